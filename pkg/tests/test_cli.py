import json

import pytest
from hypothesis import given, strategies as st

from msing.cli import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, RunConfig, chart_svg, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_chart_of_a1(capsys):
    code, out, _ = run(capsys, "chart", "--module", "trivial", "--envelope", "1",
                       "--window", "s=0..4,ts=0..8")
    assert code == EXIT_OK
    data = json.loads(out)
    keys = {(e["s"], e["t"], e["u"]) for e in data["entries"]}
    assert {(1, 1, 0), (1, 2, 1)} <= keys
    assert data["prime"] == 2 and data["profile"] == "trivial" and data["envelope"] == 1
    assert data["window"] == {"s": [0, 4], "ts": [0, 8]}


def test_chart_is_byte_identical_across_runs(capsys):
    args = ("chart", "--module", "lens:m=2,n=6", "--prime", "3")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_chart_formats_and_output_file(capsys, tmp_path):
    js = tmp_path / "c.json"
    assert run(capsys, "chart", "--module", "lens:m=2,n=6", "--out", str(js))[0] == EXIT_OK
    svg = run(capsys, "chart", "--module", "lens:m=2,n=6", "--format", "svg")[1]
    assert svg.strip() == chart_svg(js.read_text())
    assert svg.startswith("<svg")
    txt = run(capsys, "chart", "--module", "lens:m=2,n=6", "--format", "txt")[1]
    assert txt.startswith("Ext chart")


def test_total_complex_mode(capsys):
    code, out, _ = run(capsys, "chart", "--module", "tower:lens:m0=0,m1=4,n=8",
                       "--mode", "total-complex", "--window", "s=0..2,ts=-4..4")
    colim = run(capsys, "chart", "--module", "tower:lens:m0=0,m1=4,n=8",
                "--window", "s=0..2,ts=-4..4")[1]
    assert code == EXIT_OK and out == colim
    assert run(capsys, "chart", "--module", "trivial", "--mode", "total-complex")[0] == EXIT_USAGE


def test_usage_errors(capsys):
    code, _, err = run(capsys, "verify", "--profile", "complex", "--prime", "3")
    assert code == EXIT_USAGE and "prime 2" in err
    assert run(capsys, "chart", "--module", "sphere")[0] == EXIT_USAGE
    assert run(capsys, "chart", "--window", "s=zero")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--suite", "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys)[0] == EXIT_USAGE
    assert run(capsys, "singer", "--op", "Sq2")[0] == EXIT_USAGE


def test_thread_cap_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("MSING_THREADS", "0")
    assert run(capsys, "chart")[0] == EXIT_USAGE
    monkeypatch.setenv("MSING_THREADS", "2")
    assert run(capsys, "chart")[0] == EXIT_OK


def test_verify_suite_filter(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "adem", "--max-deg", "20")
    report = json.loads(out)
    assert code == EXIT_OK
    assert [s["suite"] for s in report["suites"]] == ["adem"]
    assert report["suites"][0]["passed"]


def test_verify_real_profile(capsys):
    code, out, _ = run(capsys, "verify", "--prime", "2", "--profile", "real", "--max-deg", "12",
                       "--suite", "hopf,basis,adem,modules")
    assert code == EXIT_OK
    assert all(s["passed"] for s in json.loads(out)["suites"])


def test_singer_command(capsys):
    code, out, _ = run(capsys, "singer", "--construction", "small", "--module", "trivial",
                       "--op", "Sq2", "--element", "Sq-1|1")
    assert code == EXIT_OK and out.strip() == "Sq1|1"
    code, out, _ = run(capsys, "singer", "--construction", "large", "--op", "Sq1",
                       "--element", "Su v^-1|1")
    assert code == EXIT_OK and out.strip() == "Sv^0|1"


def test_resolve_command(capsys):
    code, out, _ = run(capsys, "resolve", "--envelope", "0", "--window", "s=0..3,ts=0..2")
    data = json.loads(out)
    assert code == EXIT_OK
    # over A(0) the resolution of H has one generator (s, 0) per level
    assert data["generators"] == [[[s, 0]] for s in range(4)]


def test_lin_exit_codes(capsys):
    code, out, _ = run(capsys, "lin", "--zero-map", "--window", "s=0..1,ts=0..2", "--max-width", "8")
    assert code == EXIT_FAIL and json.loads(out)["where"] == [0, 0, 0]
    code, out, _ = run(capsys, "lin", "--window", "s=0..2,ts=0..3", "--min-width", "2",
                       "--max-width", "3", "--width-step", "1")
    assert code == EXIT_INCONCLUSIVE and json.loads(out)["witness"]["axis"] == "band"
    code, out, _ = run(capsys, "lin", "--window", "s=0..1,ts=0..2", "--max-width", "8",
                       "--width-step", "1")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "ISO"


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# chart settings\nprime = 3\nmodule = lens:m=2,n=6\nformat = txt\n")
    out = run(capsys, "chart", "--config", str(cfg))[1]
    assert "prime 3" in out
    out = run(capsys, "chart", "--config", str(cfg), "--prime", "2")[1]
    assert "prime 2" in out
    bad = tmp_path / "bad.cfg"
    bad.write_text("color = blue\n")
    assert run(capsys, "chart", "--config", str(bad))[0] == EXIT_USAGE
    assert run(capsys, "chart", "--config", str(tmp_path / "missing"))[0] == EXIT_USAGE


keys = st.from_regex(r"[a-z][a-z_]{0,8}", fullmatch=True)
values = st.from_regex(r"[A-Za-z0-9:,.=\-]{1,12}", fullmatch=True)


@given(st.dictionaries(keys, values, max_size=6))
def test_config_round_trips(d):
    cfg = RunConfig(d)
    assert RunConfig.from_text(cfg.to_text()) == cfg
