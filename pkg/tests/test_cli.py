"""Command line behavior: exit codes, report layout, reproducibility."""

import json

import pytest
from click.testing import CliRunner

from heatgauge.reports import FAIL, INCONCLUSIVE, PASS, InequalityReport
from heatgauge.verifier import cli


@pytest.fixture
def runner():
    return CliRunner()


def _row(claim, verdict, control=False):
    return InequalityReport(claim=claim, lhs=0.0, rhs=1.0,
                            verdict=verdict, control=control)


def test_run_single_suite_emits_schema_one(runner):
    res = runner.invoke(cli.main, ["run", "--suite", "finite-sweep"])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.stdout)
    assert doc["schema"] == 1
    assert doc["config"][0]["suite"] == "finite-sweep"
    assert all("claim" in r for r in doc["rows"])
    assert "timestamp" not in res.stdout


def test_run_writes_report_files(runner, tmp_path):
    out = tmp_path / "report"
    res = runner.invoke(cli.main, [
        "run", "--suite", "finite-sweep", "--out", str(out)])
    assert res.exit_code == 0, res.output
    doc = json.loads((out / "report.json").read_text())
    assert doc["schema"] == 1
    csv_text = (out / "rows.csv").read_text()
    assert csv_text.startswith("claim,suite,geometry,function,x,")
    assert len(csv_text.splitlines()) == len(doc["rows"]) + 1


def test_run_is_reproducible(runner):
    outs = []
    for _ in range(2):
        res = runner.invoke(cli.main, [
            "run", "--suite", "harnack-liyau", "--seed", "11"])
        assert res.exit_code == 0, res.output
        outs.append(res.stdout)
    assert outs[0] == outs[1]


def test_run_thread_env_does_not_change_output(runner, monkeypatch):
    outs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("HEATGAUGE_THREADS", threads)
        res = runner.invoke(cli.main, ["run", "--suite", "finite-sweep"])
        assert res.exit_code == 0, res.output
        outs.append(res.stdout)
    assert outs[0] == outs[1]


def test_run_seed_flag_overrides_config(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "suite": "subharmonic-growth", "geometry": "heisenberg",
        "n_paths": 2000, "seed": 3}))
    base = runner.invoke(cli.main, ["run", "--config", str(cfg)])
    other = runner.invoke(cli.main, ["run", "--config", str(cfg),
                                     "--seed", "4"])
    assert base.exit_code == 0 and other.exit_code == 0
    assert base.stdout != other.stdout
    assert json.loads(other.stdout)["config"][0]["seed"] == 4


def test_run_rejects_malformed_json_with_line(runner, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "suite": oops\n}')
    res = runner.invoke(cli.main, ["run", "--config", str(cfg)])
    assert res.exit_code == 2
    assert "line 2" in res.stderr


def test_run_rejects_unknown_field_by_name(runner, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"suite": "finite-sweep", "pathz": 7}))
    res = runner.invoke(cli.main, ["run", "--config", str(cfg)])
    assert res.exit_code == 2
    assert "pathz" in res.stderr


def test_run_rejects_missing_config_file(runner, tmp_path):
    res = runner.invoke(cli.main, [
        "run", "--config", str(tmp_path / "absent.json")])
    assert res.exit_code == 2
    assert "cannot read config file" in res.stderr


def test_run_numerics_failure_names_the_claim(runner, tmp_path):
    cfg = tmp_path / "blow.json"
    cfg.write_text(json.dumps({
        "suite": "semigroup-contraction", "geometry": "euclidean:1",
        "functions": ["exp:a=30"], "n_paths": 100}))
    res = runner.invoke(cli.main, ["run", "--config", str(cfg)])
    assert res.exit_code == 3
    assert "semigroup-contraction/euclidean:1" in res.stderr


def test_run_warns_on_inconclusive_rows(runner, tmp_path):
    cfg = tmp_path / "degenerate.json"
    cfg.write_text(json.dumps({
        "suite": "kernel-bound-forms", "geometry": "heisenberg",
        "n_paths": 500, "times": {"s": 0.5, "t": 0.5, "T": 0.5}}))
    res = runner.invoke(cli.main, ["run", "--config", str(cfg)])
    assert res.exit_code == 0, res.output
    assert "1 inconclusive claim(s)" in res.stderr
    doc = json.loads(res.stdout)
    assert [r["verdict"] for r in doc["rows"]] == [INCONCLUSIVE]


def test_run_exit_one_on_failed_claim(runner, monkeypatch):
    monkeypatch.setattr(cli, "run_suite",
                        lambda cfg: [_row("x/claim", FAIL)])
    res = runner.invoke(cli.main, ["run", "--suite", "finite-sweep"])
    assert res.exit_code == 1


def test_run_exit_one_on_passing_control(runner, monkeypatch):
    monkeypatch.setattr(cli, "run_suite",
                        lambda cfg: [_row("x/ctrl", PASS, control=True)])
    res = runner.invoke(cli.main, ["run", "--suite", "finite-sweep"])
    assert res.exit_code == 1


def test_run_all_suites_by_default(runner, monkeypatch):
    seen = []

    def fake(cfg):
        seen.append(cfg.suite)
        return [_row(f"{cfg.suite}/r", PASS)]

    monkeypatch.setattr(cli, "run_suite", fake)
    res = runner.invoke(cli.main, ["run"])
    assert res.exit_code == 0
    assert tuple(seen) == cli.SUITE_NAMES


def test_plot_data_emits_xy_triples(runner):
    res = runner.invoke(cli.main, ["plot-data", "--suite", "finite-sweep"])
    assert res.exit_code == 0, res.output
    lines = res.stdout.strip().splitlines()
    assert lines[0] == "claim,x,lhs,rhs"
    assert len(lines) > 1
    for line in lines[1:]:
        claim, x, lhs, rhs = line.split(",")
        float(x), float(lhs), float(rhs)


def test_plot_data_requires_suite(runner):
    res = runner.invoke(cli.main, ["plot-data"])
    assert res.exit_code != 0


def test_cd_check_prints_margin_table(runner):
    res = runner.invoke(cli.main, ["cd-check"])
    assert res.exit_code == 0, res.output
    lines = res.stdout.strip().splitlines()
    assert lines[0].startswith("function")
    names = {line.split()[0] for line in lines[1:]}
    assert {"x", "y", "z", "x*y", "x^2-y^2"} <= names
    assert all(line.rstrip().endswith("PASS") for line in lines[1:])


def test_cd_check_rejects_unknown_function(runner):
    res = runner.invoke(cli.main, ["cd-check", "--function", "bogus"])
    assert res.exit_code == 2
    assert "bogus" in res.stderr
