import json

import pytest

from fewnomial.cli import RunConfig, dispatch, render
from fewnomial.errors import InputError


def run(capsys, *argv):
    rc = dispatch(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_bound_report(capsys):
    rc, out, _ = run(capsys, "bound", "--n", "1")
    assert rc == 0
    rep = json.loads(out)
    assert rep["status"] == "certified"
    assert rep["result"]["components"]["crit"] == 16


def test_gale_report(capsys):
    rc, out, _ = run(capsys, "gale", "--support", "[[0],[1],[2],[3]]")
    assert rc == 0
    assert json.loads(out)["command"] == "gale"


def test_count2d_reduction(capsys):
    rc, out, _ = run(capsys, "count2d", "--method", "reduction")
    assert rc == 0
    assert json.loads(out)["result"]["results"]["reduction"]["count"] == 7


def test_usage_error_exit_code(capsys):
    rc, _, err = run(capsys, "bound")
    assert rc == 3 and "--n" in err
    rc, _, _ = run(capsys, "no-such-command")
    assert rc == 3


def test_input_error_exit_code(capsys):
    rc, _, err = run(capsys, "gale", "--support", "[[0],[2],[4]]")
    assert rc == 3 and "input error" in err


def test_certification_failure_exit_code(capsys):
    rc, out, _ = run(capsys, "sheared-count", "--random-k", "2", "--seed", "5", "--depth-cap", "2")
    assert rc == 2
    assert json.loads(out)["status"] == "certification_failure"


def test_byte_identical_outputs(tmp_path):
    argv = ["chambers", "--support", "[[0],[1],[3],[4]]"]
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert dispatch(argv + ["-o", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_output_path_not_in_report(tmp_path):
    p = tmp_path / "r.json"
    dispatch(["bound", "--n", "2", "-o", str(p)])
    assert "output_path" not in json.loads(p.read_text())["config"]


def test_precision_env(monkeypatch):
    monkeypatch.setenv("FEWNOMIAL_PRECISION", "96")
    assert RunConfig().precision_bits == 96


@pytest.mark.parametrize("kw", [{"precision_bits": 8}, {"subdivision_depth_cap": 0}, {"mc_samples": 0}, {"format": "xml"}])
def test_run_config_validation(kw):
    with pytest.raises(InputError):
        RunConfig(**kw)


def test_text_and_csv_formats(capsys):
    rc, out, _ = run(capsys, "bound", "--n", "1", "--format", "text")
    assert rc == 0 and "result.components.crit: 16" in out
    rc, out, _ = run(capsys, "plot-data", "--support", "[[0],[1],[2],[3]]", "--samples", "8", "--format", "csv")
    assert rc == 0
    header = out.splitlines()[0].split(",")
    assert header[:2] == ["piece", "index"]


def test_render_json_sorted():
    text = render({"b": 1, "a": 2}, "json")
    assert text.index('"a"') < text.index('"b"')
