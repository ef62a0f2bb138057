"""Command-line front end.

Every subcommand builds a JSON-serializable report, writes it to stdout or
``--output`` and returns 0 (certified), 2 (certification failure) or 3
(input or usage error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import bivariate_certifier as bc
from . import chamber_counter as cc
from . import fewnomial_builder as fb
from . import gale_discriminant as gd
from . import sheared_systems as sh
from .elimination import DegenerateSystem
from .errors import CertificationError, FewnomialError, InputError
from .numeric_core import MAX_PRECISION, GemSum, default_precision, to_rational
from .univariate_roots import IsolationConfig, isolate_gem_roots

EXIT_OK = 0
EXIT_CERT = 2
EXIT_INPUT = 3
FORMATS = ("json", "text", "csv")
RESULTANT_MAX_DEGREE = 40


class UsageError(InputError):
    pass


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = field(default_factory=default_precision)
    max_precision_bits: int = MAX_PRECISION
    subdivision_depth_cap: int = 200
    mc_samples: int = cc.DEFAULT_MC_SAMPLES
    rng_seed: int = cc.DEFAULT_SEED
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.precision_bits < 16:
            raise InputError("precision_bits must be at least 16")
        if self.precision_bits > self.max_precision_bits:
            raise InputError("precision_bits exceeds max_precision_bits")
        if self.subdivision_depth_cap < 1 or self.mc_samples < 1:
            raise InputError("caps must be positive")
        if self.format not in FORMATS:
            raise InputError(f"format must be one of {', '.join(FORMATS)}")

    def isolation(self) -> IsolationConfig:
        return IsolationConfig(self.precision_bits, self.max_precision_bits)

    def subdivision(self) -> bc.SubdivisionConfig:
        return bc.SubdivisionConfig(self.precision_bits, self.max_precision_bits, self.subdivision_depth_cap)

    def sheared(self) -> sh.ShearedConfig:
        return sh.ShearedConfig(self.precision_bits, self.max_precision_bits, self.subdivision_depth_cap)

    def chambers(self) -> cc.ChamberConfig:
        return cc.ChamberConfig(self.mc_samples, self.rng_seed, self.precision_bits)

    def to_json(self):
        out = asdict(self)
        out.pop("output_path")
        return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input helpers


def _load_json(arg: str):
    """Inline JSON or a path to a JSON file."""
    text = arg.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def _support(arg: str) -> gd.Support:
    obj = _load_json(arg)
    if isinstance(obj, list):
        obj = {"points": [p if isinstance(p, list) else [p] for p in obj]}
    return gd.Support.from_json(obj)


def _rationals(text: str) -> list[Fraction]:
    try:
        return [to_rational(v) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational list {text!r}") from exc


def _sparse_system(args) -> bc.SparseSystem:
    if args.system is not None:
        return bc.SparseSystem.from_json(_load_json(args.system))
    return bc.seven_root_system(args.alpha)


def _gem(args, cfg: RunConfig) -> GemSum:
    if args.gem is not None:
        return GemSum.from_json(_load_json(args.gem))
    if args.m is not None:
        return fb.grow_chain(args.m, config=cfg.isolation())[-1][0]
    return fb.base_m3()


# ---------------------------------------------------------------------------
# subcommands; each returns (report, certified)


def cmd_verify_example(args, cfg: RunConfig):
    rep = bc.certify_example(
        args.alpha_lo,
        args.alpha_hi,
        args.stride,
        subdivision=not args.no_subdivision,
        find_extent=not args.no_extent,
        iso_config=cfg.isolation(),
        sub_config=cfg.subdivision(),
    )
    ok = rep["certified_subrange"] is not None and rep["methods_agree"]
    return rep, ok


def cmd_grow(args, cfg: RunConfig):
    iso = cfg.isolation()
    chain = fb.grow_chain(args.m, args.b_new, iso)
    steps = []
    ok = True
    for f, cert in chain:
        count = len(isolate_gem_roots(f, iso))
        entry = {"m": f.m, "f": f.to_json(), "root_count": count, "expected": 2 * f.m - 1}
        if cert is not None:
            entry["certificate"] = cert.to_json()
            entry["inequalities_hold"] = cert.inequalities_hold()
            ok = ok and entry["inequalities_hold"]
        ok = ok and count == 2 * f.m - 1
        steps.append(entry)
    return {"m_target": args.m, "b_new": args.b_new, "chain": steps}, ok


def cmd_lift(args, cfg: RunConfig):
    f = _gem(args, cfg)
    S = fb.lift_to_bivariate(f, args.exponent_budget, verify=True, config=cfg.isolation())
    count = bc.count_positive_reduction(S, cfg.isolation())
    expected = len(isolate_gem_roots(f, cfg.isolation()))
    rep = {"f": f.to_json(), "system": S.to_json(), "positive_roots": count.to_json(), "roots_of_f": expected}
    return rep, count.count == expected


def cmd_reduce(args, cfg: RunConfig):
    S = _sparse_system(args)
    g, mm = bc.reduce_to_univariate(S, args.pivot)
    roots = isolate_gem_roots(g, cfg.isolation())
    rep = {
        "system": S.to_json(),
        "univariate": g.to_json(),
        "monomial_map": mm.to_json(),
        "roots": [r.to_json() for r in roots],
        "root_count": len(roots),
    }
    return rep, True


def cmd_count2d(args, cfg: RunConfig):
    S = _sparse_system(args)
    methods = ["reduction", "subdivision", "resultant"] if args.method == "all" else [args.method]
    skipped = {}
    if args.method == "all" and S.total_degree() > RESULTANT_MAX_DEGREE:
        methods.remove("resultant")
        skipped["resultant"] = f"total degree {S.total_degree()} exceeds {RESULTANT_MAX_DEGREE}"
    runners = {
        "reduction": lambda: bc.count_positive_reduction(S, cfg.isolation()),
        "subdivision": lambda: bc.count_positive_subdivision(S, None, cfg.subdivision()),
        "resultant": lambda: bc.count_positive_resultant(S, RESULTANT_MAX_DEGREE),
    }
    results, errors = {}, {}
    for name in methods:
        try:
            results[name] = runners[name]().to_json()
        except (CertificationError, DegenerateSystem) as exc:
            errors[name] = f"{type(exc).__name__}: {exc}"
    counts = sorted({r["count"] for r in results.values()})
    rep = {"system": S.to_json(), "results": results, "errors": errors, "skipped": skipped, "agree": len(counts) == 1}
    return rep, not errors and len(counts) == 1


def cmd_gale(args, cfg: RunConfig):
    A = _support(args.support)
    frame = gd.gale_frame(A)
    return {"frame": frame.to_json(), "generic": gd.genericity_check(A)}, True


def cmd_hk_witness(args, cfg: RunConfig):
    A = _support(args.support)
    frame = gd.gale_frame(A)
    lam = _rationals(args.lam)
    t = _rationals(args.t) if args.t else [Fraction(1)] * A.n
    coeffs, x = gd.horn_kapranov_witness(frame, lam, t)
    res = gd.singular_residuals(A, coeffs, x)
    rep = {
        "frame": frame.to_json(),
        "lambda": [str(v) for v in lam],
        "t": [str(v) for v in t],
        "coefficients": [str(c) for c in coeffs],
        "singular_point": [str(v) for v in x],
        "residuals": [str(r) for r in res],
        "reduced": gd.gamma_reduce(coeffs, frame, cfg.precision_bits).to_json(),
    }
    return rep, all(r == 0 for r in res)


def cmd_sheared_count(args, cfg: RunConfig):
    if args.system is not None:
        S = sh.ShearedSystem.from_json(_load_json(args.system))
    else:
        S = sh.random_system(random.Random(cfg.rng_seed), args.random_k)
    if args.box is not None:
        flat = _rationals(args.box)
        if len(flat) != 2 * S.k:
            raise InputError(f"box needs {2 * S.k} numbers")
        box = tuple((flat[2 * i], flat[2 * i + 1]) for i in range(S.k))
    else:
        box = sh.default_box(S.k)
    roots = sh.solve_box(S, box, cfg.sheared())
    hist: dict[tuple, int] = {}
    for r in roots:
        hist[r.positive_chamber] = hist.get(r.positive_chamber, 0) + 1
    positive = hist.get(tuple([1] * S.j), 0)
    rep = {
        "system": S.to_json(),
        "box": [[str(a), str(b)] for a, b in box],
        "roots": [r.to_json() for r in roots],
        "total": len(roots),
        "per_chamber": [{"signs": list(k), "count": v} for k, v in sorted(hist.items())],
        "positive_chamber_count": positive,
    }
    ok = True
    if S.j > S.k:
        pub = sh.published_bound(S.k, S.j - S.k, cfg.precision_bits)
        rep["published_bound"] = pub.to_json()
        rep["printed_bound"] = sh.printed_bound(S.k, S.j - S.k, cfg.precision_bits).to_json()
        rep["within_published_bound"] = positive <= sh.floor_of(pub)
        ok = rep["within_published_bound"]
    if args.oracle:
        if not S.integral:
            raise InputError("the dense oracle needs integer exponents")
        rep["oracle_count"] = sh.dense_oracle_count(S, box)
        ok = ok and rep["oracle_count"] == len(roots)
    return rep, ok


def cmd_chambers(args, cfg: RunConfig):
    A = _support(args.support)
    if A.m == A.n + 3:
        report = cc.count_chambers_n3(A, cfg.sheared())
    elif A.m == A.n + 4:
        report = cc.count_chambers_n4(A, cfg.chambers())
    else:
        raise InputError("chambers needs #A = n + 3 or n + 4")
    rep = report.to_json()
    if args.oracle and A.n == 1:
        classes = cc.signature_classes(A, cfg.mc_samples, cfg.rng_seed)
        rep["signature_classes"] = [{"signature": k.to_json(), "samples": v} for k, v in classes.items()]
        rep["signature_class_count"] = len(classes)
    return rep, True


def cmd_bound(args, cfg: RunConfig):
    comps, total = cc.diffeotopy_bound(args.n)
    return {"components": comps, "total": total}, True


def cmd_plot_data(args, cfg: RunConfig):
    """Rows of sampled Psi images: arcs for #A = n + 3, a lambda mesh for n + 4."""
    A = _support(args.support)
    frame = gd.gale_frame(A)
    N = args.samples
    rows = []
    if frame.k == 2:
        header = ["piece", "index", "u", "x1", "x2"]
        for arc in cc.plane_arcs(frame):
            for i in range(N):
                u = arc.lo + (arc.hi - arc.lo) * Fraction(i + 1, N + 1)
                lam = tuple(u * p + q for p, q in zip(arc.P, arc.Q))
                try:
                    pt = gd.psi(frame, lam, cfg.precision_bits)
                except gd.OnArrangement:
                    continue
                rows.append([arc.index, i, float(u)] + [c.mid_float() for c in pt.coords])
    elif frame.k == 3:
        header = ["piece", "index", "l1", "l2", "x1", "x2", "x3"]
        R = Fraction(args.extent)
        idx = 0
        for i in range(N):
            for j in range(N):
                lam = (-R + 2 * R * Fraction(2 * i + 1, 2 * N), -R + 2 * R * Fraction(2 * j + 1, 2 * N))
                try:
                    pt = gd.psi(frame, lam, cfg.precision_bits)
                except gd.OnArrangement:
                    continue
                rows.append([i, idx, float(lam[0]), float(lam[1])] + [c.mid_float() for c in pt.coords])
                idx += 1
    else:
        raise InputError("plot-data needs #A = n + 3 or n + 4")
    return {"header": header, "rows": rows}, True


COMMANDS = {
    "verify-example": cmd_verify_example,
    "grow": cmd_grow,
    "lift": cmd_lift,
    "reduce": cmd_reduce,
    "count2d": cmd_count2d,
    "gale": cmd_gale,
    "hk-witness": cmd_hk_witness,
    "sheared-count": cmd_sheared_count,
    "chambers": cmd_chambers,
    "bound": cmd_bound,
    "plot-data": cmd_plot_data,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="working precision in bits")
    common.add_argument("--max-precision", type=int, default=MAX_PRECISION)
    common.add_argument("--depth-cap", type=int, default=200, help="subdivision depth cap")
    common.add_argument("--mc-samples", type=int, default=cc.DEFAULT_MC_SAMPLES)
    common.add_argument("--seed", type=int, default=cc.DEFAULT_SEED)
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=FORMATS, default="json")

    p = _Parser(prog="fewnomial", description="Certified fewnomial root counts and discriminant chambers.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("verify-example", parents=[common], help="certify the seven-root bivariate example")
    s.add_argument("--alpha-lo", type=int, default=1936254)
    s.add_argument("--alpha-hi", type=int, default=1936838)
    s.add_argument("--stride", type=int, default=73)
    s.add_argument("--no-subdivision", action="store_true")
    s.add_argument("--no-extent", action="store_true", help="skip the bisection for the range edges")

    s = sub.add_parser("grow", parents=[common], help="build f_3, ..., f_m with certificates")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--b-new", type=int, default=7)

    s = sub.add_parser("lift", parents=[common], help="lift a univariate sum to a bivariate system")
    s.add_argument("--gem", default=None, help="GemSum JSON (inline or file)")
    s.add_argument("--m", type=int, default=None, help="lift the chain element f_m instead")
    s.add_argument("--exponent-budget", type=int, default=10**9)

    for name, helptext in (("reduce", "reduce a system to one variable"), ("count2d", "count positive roots")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--system", default=None, help="SparseSystem JSON (inline or file)")
        s.add_argument("--alpha", type=int, default=1936500, help="use the seven-root example at this alpha")
        if name == "reduce":
            s.add_argument("--pivot", type=int, default=None)
        else:
            s.add_argument("--method", choices=["reduction", "subdivision", "resultant", "all"], default="all")

    s = sub.add_parser("gale", parents=[common], help="Gale dual, odd cell and reduction exponents")
    s.add_argument("--support", required=True, help="Support JSON (inline or file)")

    s = sub.add_parser("hk-witness", parents=[common], help="Horn-Kapranov singular polynomial")
    s.add_argument("--support", required=True)
    s.add_argument("--lam", required=True, help="comma separated rationals")
    s.add_argument("--t", default=None, help="comma separated nonzero rationals (default all 1)")

    s = sub.add_parser("sheared-count", parents=[common], help="certified roots of a sheared system")
    s.add_argument("--system", default=None, help="ShearedSystem JSON (inline or file)")
    s.add_argument("--random-k", type=int, choices=[1, 2], default=2, help="random system when --system is absent")
    s.add_argument("--box", default=None, help="lo1,hi1[,lo2,hi2]")
    s.add_argument("--oracle", action="store_true", help="compare with the dense resultant oracle")

    s = sub.add_parser("chambers", parents=[common], help="chambers of the reduced discriminant complement")
    s.add_argument("--support", required=True)
    s.add_argument("--oracle", action="store_true", help="add the sampled root-signature classes (n = 1)")

    s = sub.add_parser("bound", parents=[common], help="components of the diffeotopy-type bound")
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("plot-data", parents=[common], help="sampled Psi images for external plotting")
    s.add_argument("--support", required=True)
    s.add_argument("--samples", type=int, default=64)
    s.add_argument("--extent", default="4", help="half width of the lambda mesh for n + 4")
    return p


def _run_config(args) -> RunConfig:
    prec = args.precision if args.precision is not None else default_precision()
    return RunConfig(
        precision_bits=prec,
        max_precision_bits=args.max_precision,
        subdivision_depth_cap=args.depth_cap,
        mc_samples=args.mc_samples,
        rng_seed=args.seed,
        output_path=args.output,
        format=args.format,
    )


# ---------------------------------------------------------------------------
# rendering


def _text(obj, prefix="") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines.extend(_text(obj[k], f"{prefix}{k}."))
        return lines
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        lines = []
        for i, v in enumerate(obj):
            lines.extend(_text(v, f"{prefix}{i}."))
        return lines
    return [f"{prefix[:-1]}: {json.dumps(obj)}"]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if fmt == "text":
        return "\n".join(_text(report)) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    result = report.get("result", {})
    if "header" in result:
        w.writerow(result["header"])
        w.writerows(result["rows"])
    else:
        w.writerow(["key", "value"])
        for line in _text(report):
            k, v = line.split(": ", 1)
            w.writerow([k, v])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig | None) -> None:
    if cfg is not None and cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def dispatch(argv) -> int:
    cfg = None
    try:
        args = build_parser().parse_args(list(argv))
        cfg = _run_config(args)
        result, ok = COMMANDS[args.command](args, cfg)
    except InputError as exc:
        print(f"fewnomial: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FewnomialError, DegenerateSystem) as exc:
        report = {
            "command": argv[0] if argv else None,
            "config": cfg.to_json() if cfg else None,
            "status": "certification_failure",
            "error": f"{type(exc).__name__}: {exc}",
        }
        _emit(render(report, cfg.format if cfg else "json"), cfg)
        print(f"fewnomial: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    report = {
        "command": args.command,
        "config": cfg.to_json(),
        "status": "certified" if ok else "certification_failure",
        "result": result,
    }
    _emit(render(report, cfg.format), cfg)
    return EXIT_OK if ok else EXIT_CERT


def main(argv=None) -> None:
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
