"""Command-line surface: formats, exit codes, determinism, round-trips."""

import json

import pytest
from click.testing import CliRunner

from bayescal.cli import main
from bayescal.design import canonical_json, spec_to_dict

from conftest import binary_single_spec, continuous_spec


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, args):
    return runner.invoke(main, args, catch_exceptions=False)


class TestOcCommand:
    def test_pretty_output(self, runner):
        result = invoke(runner, ["oc", "fig1-neutral", "--c", "0.975"])
        assert result.exit_code == 0
        assert "gamma1" in result.output
        assert "0.5000" in result.output
        assert "0.0250" in result.output  # flat-prior ft1e = 1 - c

    def test_invalid_threshold_exits_2(self, runner):
        result = invoke(runner, ["oc", "fig1-neutral", "--c", "1.5"])
        assert result.exit_code == 2
        assert "rule.c" in result.stderr

    def test_csv_single_row(self, runner):
        result = invoke(runner, ["oc", "fig1-neutral", "--format", "csv"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert len(lines) == 2
        assert lines[0].strip() == "bp,bcp,bt1e,ft1e,pid,for,gamma1"

    def test_json_round_trips(self, runner):
        result = invoke(runner, ["oc", "fig1-neutral", "--format", "json"])
        assert result.exit_code == 0
        assert canonical_json(json.loads(result.output)) == result.output

    def test_config_file_path(self, runner, tmp_path):
        path = tmp_path / "design.json"
        path.write_text(canonical_json(spec_to_dict(continuous_spec())))
        result = invoke(runner, ["oc", str(path)])
        assert result.exit_code == 0

    def test_missing_config(self, runner):
        result = invoke(runner, ["oc", "no-such-design"])
        assert result.exit_code == 2


class TestValidateCommand:
    def test_valid(self, runner):
        assert invoke(runner, ["validate", "culprit-shock"]).exit_code == 0

    def test_invalid_reports_all(self, runner, tmp_path):
        doc = spec_to_dict(continuous_spec())
        doc["rule"]["c"] = 2.0
        doc["sigma_t"] = -1.0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        result = invoke(runner, ["validate", str(path)])
        assert result.exit_code == 2
        assert "rule.c" in result.stderr
        assert "sigma_t" in result.stderr


class TestCurveCommand:
    def test_row_count(self, runner):
        result = invoke(runner, ["curve", "fig1-neutral", "--c-min", "0.5",
                                 "--c-max", "0.99", "--steps", "99",
                                 "--format", "csv"])
        assert result.exit_code == 0
        assert len(result.output.strip().splitlines()) == 100

    def test_flat_prior_ft1e_column(self, runner):
        result = invoke(runner, ["curve", "fig1-neutral", "--c-min", "0.5",
                                 "--c-max", "0.9", "--steps", "5",
                                 "--format", "json"])
        rows = json.loads(result.output)
        for row in rows:
            assert row["ft1e"] == pytest.approx(1 - row["c"], abs=1e-8)

    def test_binary_staircase_rows_repeat(self, runner):
        result = invoke(runner, ["curve", "figs2-neutral", "--c-min", "0.9",
                                 "--c-max", "0.9002", "--steps", "4",
                                 "--format", "json"])
        rows = json.loads(result.output)
        metrics = [{k: v for k, v in row.items() if k != "c"} for row in rows]
        assert all(m == metrics[0] for m in metrics[1:])

    def test_bad_range_exits_2(self, runner):
        result = invoke(runner, ["curve", "fig1-neutral", "--c-min", "0.9",
                                 "--c-max", "0.5", "--steps", "10"])
        assert result.exit_code == 2
        result = invoke(runner, ["curve", "fig1-neutral", "--c-min", "0.1",
                                 "--c-max", "0.9", "--steps", "1"])
        assert result.exit_code == 2


class TestCalibrateCommand:
    def test_culprit_pid_row(self, runner):
        result = invoke(runner, ["calibrate", "culprit-shock", "--target",
                                 "pid=0.025", "--format", "json"])
        assert result.exit_code == 0
        rows = json.loads(result.output)
        assert rows[0]["c_star"] == pytest.approx(0.772, abs=0.01)

    def test_culprit_ft1e_row(self, runner):
        result = invoke(runner, ["calibrate", "culprit-shock", "--target",
                                 "ft1e=0.025", "--format", "json"])
        rows = json.loads(result.output)
        assert rows[0]["c_star"] == pytest.approx(0.975, abs=0.01)

    def test_csv_schema(self, runner):
        result = invoke(runner, ["calibrate", "fig1-neutral", "--target",
                                 "ft1e=0.025", "--format", "csv"])
        header = result.output.splitlines()[0].strip()
        assert header == "scenario,target_metric,target_level,c_star,ft1e,bt1e,for,bcp,bp"

    def test_level_validation_exits_2(self, runner):
        result = invoke(runner, ["calibrate", "culprit-shock", "--target",
                                 "pid=1.5"])
        assert result.exit_code == 2

    def test_scenarios_file(self, runner, tmp_path):
        scenarios = [{"name": "neutral", "prior": {"kind": "beta", "alpha": 74.0,
                                                   "beta": 52.0}}]
        path = tmp_path / "scenarios.json"
        path.write_text(json.dumps(scenarios))
        result = invoke(runner, ["calibrate", "culprit-shock", "--target",
                                 "pid=0.01", "--scenarios", str(path),
                                 "--format", "json"])
        rows = json.loads(result.output)
        assert rows[0]["scenario"] == "neutral"
        assert rows[0]["c_star"] == pytest.approx(0.960, abs=0.01)


class TestSimulateCommand:
    def test_deterministic_bytes(self, runner):
        args = ["simulate", "fig1-neutral", "--sims", "20000", "--seed", "42",
                "--format", "json"]
        first = invoke(runner, args)
        second = invoke(runner, args)
        assert first.output == second.output

    def test_deltas_reported(self, runner):
        result = invoke(runner, ["simulate", "fig1-neutral", "--sims", "20000",
                                 "--seed", "7", "--format", "json"])
        doc = json.loads(result.output)
        assert "closed_form" in doc and "delta" in doc
        assert abs(doc["delta"]["bp"]) < 0.02

    def test_zero_sims_exits_2(self, runner):
        result = invoke(runner, ["simulate", "fig1-neutral", "--sims", "0"])
        assert result.exit_code == 2


class TestStrictMode:
    def test_precision_warning_escalates_to_exit_3(self, runner, tmp_path):
        # sub-unit beta shapes put a singularity at the support edge, which
        # the refinement check flags; --strict turns that into exit 3
        doc = {
            "endpoint": "binary_two_arm",
            "n_t": 20, "n_c": 20,
            "null_rate": 0.5,
            "benefit": "lower_rate",
            "analysis_prior": {"t": {"kind": "beta", "alpha": 0.5, "beta": 0.5},
                               "c": {"kind": "beta", "alpha": 0.5, "beta": 0.5}},
            "design_prior": {"t": {"kind": "beta", "alpha": 0.5, "beta": 0.5},
                             "c": {"kind": "beta", "alpha": 0.5, "beta": 0.5}},
            "rule": {"margin": 0.0, "c": 0.9, "direction": "greater"},
        }
        path = tmp_path / "rough.json"
        path.write_text(json.dumps(doc))
        relaxed = runner.invoke(main, ["oc", str(path)])
        assert relaxed.exit_code == 0
        # the grid is now cached; strict mode must still see the diagnostic
        strict = runner.invoke(main, ["oc", str(path), "--strict"])
        assert strict.exit_code == 3


class TestPresetsCommand:
    def test_listing(self, runner):
        result = invoke(runner, ["presets"])
        names = result.output.split()
        assert "culprit-shock" in names
        assert "fig1-neutral" in names

    def test_dump(self, runner):
        result = invoke(runner, ["presets", "culprit-shock"])
        doc = json.loads(result.output)
        assert doc["n_t"] == 344 and doc["n_c"] == 341


class TestDecideCommand:
    def test_culprit_decisions(self, runner):
        result = invoke(runner, ["decide", "culprit-shock",
                                 '{"x_t": 172, "x_c": 194}'])
        assert result.exit_code == 0
        assert "FAIL" in result.output
        assert "0.9645" in result.output
