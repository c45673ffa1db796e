import json

import pytest

from fourmove import census_path, pipeline
from fourmove import knuthbendix as kb
from fourmove import toddcoxeter as tc
from fourmove.cli import main
from fourmove.fpgroup import format_presentation, build_Gnk
from fourmove.knotcodes import parse_gauss_code

from conftest import FIGURE_EIGHT, TREFOIL, UNKNOT

# small, clock-free limits so verdicts are reproducible byte for byte
QUICK = pipeline.StageConfig((
    pipeline.Stage("tc", 0, tc.TcLimits(5_000)),
    pipeline.Stage("kb", 0, kb.KbLimits(max_rules=300, max_seconds=None)),
    pipeline.Stage("kb", 1, kb.KbLimits(max_rules=300, max_seconds=None)),
))
HARD = census_path().read_text().split()[:2]


@pytest.mark.parametrize("code", [TREFOIL, FIGURE_EIGHT, UNKNOT])
def test_small_knots_resolve_at_first_stage(code):
    v = pipeline.classify(parse_gauss_code(code))
    assert v.status == pipeline.TRIVIALLY_VALUED
    assert v.order == 2 and v.stage == 1 and not v.nonstandard_order
    assert v.stages[0].detail == "INDEX = 2"


def test_census_knot_unresolved_under_small_limits():
    v = pipeline.classify(parse_gauss_code(HARD[0]), QUICK)
    assert v.status == pipeline.UNRESOLVED
    assert [s.result for s in v.stages] == ["OVERFLOW"] * 3
    assert v.order is None


def test_kb_stage_can_prove_finiteness():
    cfg = pipeline.StageConfig((pipeline.Stage("kb", 0, kb.KbLimits()),))
    v = pipeline.classify(parse_gauss_code(TREFOIL), cfg)
    assert v.status == pipeline.TRIVIALLY_VALUED and v.stages[0].method == "kb"
    assert v.order == 2


def test_stage_config_validation_and_round_trip():
    with pytest.raises(ValueError):
        pipeline.StageConfig(())
    with pytest.raises(ValueError):
        pipeline.StageConfig((pipeline.Stage("kb", 1, kb.KbLimits()),
                              pipeline.Stage("kb", 0, kb.KbLimits())))
    with pytest.raises(TypeError):
        pipeline.Stage("tc", 0, kb.KbLimits())
    with pytest.raises(ValueError):
        pipeline.Stage("gap", 0, kb.KbLimits())
    again = pipeline.StageConfig.from_dict(QUICK.to_dict())
    assert again == QUICK
    d = pipeline.StageConfig.default()
    assert [(s.method, s.depth) for s in d.stages] == [("tc", 0), ("kb", 0), ("kb", 1), ("kb", 2)]
    assert d.stages[0].limits.max_cosets == 10**7
    assert d.stages[1].limits.max_seconds == 300


def test_env_overrides_default_limits(monkeypatch):
    monkeypatch.setenv("FOURMOVE_MAX_COSETS", "1234")
    monkeypatch.setenv("FOURMOVE_KB_SECONDS", "7")
    d = pipeline.StageConfig.default()
    assert d.stages[0].limits.max_cosets == 1234
    assert d.stages[1].limits.max_seconds == 7.0


def write_lines(path, lines):
    path.write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    return path


MIXED = [TREFOIL, "", HARD[0], "1,2,1,2", UNKNOT, HARD[1], FIGURE_EIGHT]


def test_run_census_report_and_outputs(tmp_path):
    src = write_lines(tmp_path / "in.txt", MIXED)
    out, fail = tmp_path / "out.jsonl", tmp_path / "fail.txt"
    rep = pipeline.run_census(src, QUICK, 1, out, fail)
    assert rep.totals == {"trivially_valued": 3, "unresolved": 2, "parse_error": 1}
    assert sum(rep.totals.values()) == rep.lines == 6
    assert rep.per_stage == {1: 3}
    assert rep.parse_errors[0][0] == 4 and "alternation" in rep.parse_errors[0][1]
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert [r["line"] for r in rows] == [1, 3, 4, 5, 6, 7]
    assert all({"line", "code", "crossings", "stages", "status"} <= set(r) for r in rows)
    assert rows[0]["order"] == 2 and "seconds" not in rows[0]["stages"][0]
    assert fail.read_text().split() == HARD[:2]


def test_output_independent_of_worker_count(tmp_path):
    src = write_lines(tmp_path / "in.txt", MIXED)
    outs = []
    for w in (1, 2):
        out = tmp_path / f"out{w}.jsonl"
        pipeline.run_census(src, QUICK, w, out)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_failure_file_round_trip(tmp_path):
    src = write_lines(tmp_path / "in.txt", MIXED)
    fail1, fail2 = tmp_path / "f1.txt", tmp_path / "f2.txt"
    pipeline.run_census(src, QUICK, 1, None, fail1)
    rep = pipeline.run_census(fail1, QUICK, 1, None, fail2)
    assert rep.totals["unresolved"] == rep.lines == 2
    assert fail1.read_bytes() == fail2.read_bytes()


def test_empty_file_gives_zero_report(tmp_path):
    src = write_lines(tmp_path / "empty.txt", [])
    rep = pipeline.run_census(src, QUICK, 1)
    assert rep.lines == 0 and set(rep.totals.values()) == {0}
    assert rep.per_stage == {} and rep.failures == []


def test_probe_small_cases():
    assert (r := pipeline.probe_gn(1, 0)).depth == 0 and r.order == 2
    assert (r := pipeline.probe_gn(2, 0)).depth == 0 and r.order == 8
    r = pipeline.probe_gn(3, 1, start_cosets=1000, max_cosets=2000)
    assert r.depth is None and str(r).startswith("INCONCLUSIVE")


# command line

def test_cli_classify_code(capsys):
    assert main(["classify", TREFOIL]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["status"] == "trivially_valued" and row["order"] == 2


def test_cli_classify_file_and_stage_file(tmp_path, capsys):
    src = write_lines(tmp_path / "in.txt", [TREFOIL, UNKNOT])
    stages = tmp_path / "stages.json"
    stages.write_text(json.dumps(QUICK.to_dict()))
    out = tmp_path / "o.jsonl"
    assert main(["classify", str(src), "--stages", str(stages), "--workers", "1",
                 "--out", str(out)]) == 0
    assert "trivially_valued: 2" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 2


@pytest.mark.parametrize("argv", [
    ["classify", "1,2,1,2"],
    ["classify", TREFOIL, "--stages", "/nonexistent.json"],
    ["tc", "/nonexistent"],
    ["probe-gn", "--n", "0", "--kmax", "1"],
    ["nosuchcommand"],
])
def test_cli_input_faults(argv, capsys):
    assert main(argv) == 2


def test_cli_engine_passthroughs(tmp_path, capsys):
    f = tmp_path / "d8.txt"
    f.write_text(format_presentation(build_Gnk(2, 0)))
    assert main(["tc", str(f)]) == 0
    assert capsys.readouterr().out.strip() == "INDEX = 8"
    assert main(["tc", str(f), "--strategy", "felsch"]) == 0
    assert capsys.readouterr().out.strip() == "INDEX = 8"
    assert main(["kb", str(f)]) == 0
    assert capsys.readouterr().out.strip() == "CONFLUENT rules=5 order=8"
    free = tmp_path / "free.txt"
    free.write_text("gens: 2; involutive: 00\n")
    assert main(["tc", str(free), "--max-cosets", "100"]) == 0
    assert capsys.readouterr().out.strip() == "OVERFLOW"
    bad = tmp_path / "bad.txt"
    bad.write_text("gens: 1; involutive: 0\ng7\n")
    assert main(["kb", str(bad)]) == 2
