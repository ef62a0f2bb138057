"""Certified real root counts for fewnomial systems and chambers of reduced A-discriminants."""

from .errors import CertificationError, FewnomialError, InputError

__version__ = "0.1.0"

__all__ = ["CertificationError", "FewnomialError", "InputError", "__version__"]
