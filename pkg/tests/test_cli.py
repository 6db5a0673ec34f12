"""Command-line surface: formats, reproducibility, and exit codes."""

import json
import math

import pytest
from click.testing import CliRunner

from coherentid.cli import main


@pytest.fixture
def runner():
    return CliRunner()


class TestCurves:
    def test_default_grid_row_count(self, runner):
        result = runner.invoke(main, ["curves"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "strategy,delta_abs,probability"
        assert len(lines) == 1 + 5 * 301

    def test_known_value_row(self, runner):
        result = runner.invoke(main, ["curves", "--min", "0", "--max", "3", "--steps", "301"])
        rows = [line for line in result.output.splitlines() if line.startswith("bs,1,")]
        assert len(rows) == 1
        prob = float(rows[0].split(",")[2])
        assert prob == pytest.approx(0.283469, abs=5e-7)

    def test_emitted_curves_respect_ordering(self, runner):
        result = runner.invoke(main, ["curves"])
        table = {}
        for line in result.output.strip().splitlines()[1:]:
            name, delta, prob = line.split(",")
            table.setdefault(name, []).append(float(prob))
        for i in range(301):
            assert table["sb"][i] <= table["sbf"][i] <= table["bs"][i] <= table["idp"][i]
            assert table["opt"][i] <= table["bs"][i]

    def test_writes_file(self, runner, tmp_path):
        out = tmp_path / "curves.csv"
        result = runner.invoke(main, ["curves", "--steps", "5", "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_text().startswith("strategy,delta_abs,probability")

    def test_bad_steps(self, runner):
        result = runner.invoke(main, ["curves", "--steps", "1"])
        assert result.exit_code == 2


class TestSimulate:
    BASE = [
        "simulate", "--alpha1", "0", "--alpha2", "1", "--true-state", "1",
        "--shots", "20000", "--seed", "7",
    ]

    def test_no_errors_and_expected_rate(self, runner):
        result = runner.invoke(main, self.BASE)
        assert result.exit_code == 0
        payload = json.loads(result.output)
        counts = payload["counts"]
        assert counts["error"] == 0
        assert counts["identified_2"] == 0
        p1 = 1 - math.exp(-1 / 3)
        sigma = math.sqrt(p1 * (1 - p1) / 20000)
        assert abs(counts["identified_1"] / 20000 - p1) <= 4 * sigma
        assert payload["expected"]["p_identify_1"] == pytest.approx(p1, abs=1e-12)

    def test_byte_identical_reruns(self, runner):
        first = runner.invoke(main, self.BASE).output
        second = runner.invoke(main, self.BASE).output
        assert first == second

    def test_zero_shots(self, runner):
        result = runner.invoke(
            main,
            ["simulate", "--alpha1", "0", "--alpha2", "1", "--true-state", "1",
             "--shots", "0", "--seed", "1"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert sum(payload["counts"].values()) == 0

    def test_missing_parameters_usage_error(self, runner):
        result = runner.invoke(main, ["simulate", "--alpha1", "0"])
        assert result.exit_code == 2

    def test_records_csv(self, runner, tmp_path):
        records = tmp_path / "shots.csv"
        result = runner.invoke(
            main,
            ["simulate", "--alpha1", "0", "--alpha2", "2", "--true-state", "2",
             "--shots", "50", "--seed", "3", "--records", str(records)],
        )
        assert result.exit_code == 0
        lines = records.read_text().strip().splitlines()
        assert lines[0] == "seed,shot,click_0,click_1,outcome"
        assert len(lines) == 51
        assert all(line.split(",")[-1] in ("identified_2", "inconclusive") for line in lines[1:])

    def test_config_file(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "alpha1": "0", "alpha2": "1", "true_state": 1, "shots": 100, "seed": 5,
        }))
        result = runner.invoke(main, ["simulate", "--config", str(config)])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["config"]["shots"] == 100

    def test_cli_flag_overrides_config(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "alpha1": "0", "alpha2": "1", "true_state": 1, "shots": 100, "seed": 5,
        }))
        result = runner.invoke(
            main, ["simulate", "--config", str(config), "--shots", "10"]
        )
        payload = json.loads(result.output)
        assert payload["config"]["shots"] == 10


class TestVerify:
    def test_fock_battery(self, runner):
        result = runner.invoke(main, ["verify", "--fock", "--n-max", "10"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["all_pass"]
        names = {c["check"] for c in payload["checks"]}
        assert "splitter-equals-optimal-comparator" in names
        assert "delta-quadrature" in names
        assert all(set(c) == {"check", "params", "residual", "tolerance", "pass"}
                   for c in payload["checks"])

    def test_qudit_battery(self, runner):
        result = runner.invoke(main, ["verify", "--qudit", "--d", "3"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["all_pass"]
        names = {c["check"] for c in payload["checks"]}
        assert "appendix-block-eigenvalues" in names
        assert "sb-positivity-boundary" in names

    def test_full_battery_passes(self, runner):
        result = runner.invoke(main, ["verify", "--n-max", "8"])
        assert result.exit_code == 0
        assert json.loads(result.output)["all_pass"]

    def test_failing_check_exits_nonzero(self, runner, monkeypatch):
        from coherentid import verify as verify_mod

        def broken_battery(n_max):
            return [verify_mod.CheckResult("forced-failure", {}, 1.0, 1e-12)]

        monkeypatch.setattr(verify_mod, "fock_battery", broken_battery)
        result = runner.invoke(main, ["verify", "--fock", "--n-max", "4"])
        assert result.exit_code == 1
        payload = json.loads(result.output)
        assert not payload["all_pass"]
        assert payload["checks"][0]["pass"] is False


class TestDatabase:
    def test_ring_summary(self, runner):
        result = runner.invoke(
            main, ["database", "--n", "3", "--ring-alpha", "1.0",
                   "--shots", "5000", "--seed", "11"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["n"] == 3
        assert payload["counts"]["misidentifications"] == 0
        assert payload["exponent_constants"]["circuit"] == pytest.approx(0.25)
        assert payload["exponent_constants"]["published"] == pytest.approx(1 / math.sqrt(2))
        p = payload["p_analytic_circuit"]
        assert abs(payload["mc_estimate"] - p) <= 5 * payload["mc_stderr"] + 1e-9

    def test_explicit_references(self, runner):
        result = runner.invoke(
            main, ["database", "--refs", '["0", "1.5", "-1.5j"]',
                   "--true-index", "2", "--shots", "1000", "--seed", "2"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["n"] == 3
        # Both constants' predictions appear side by side and disagree.
        assert payload["p_paper_constant"] != payload["p_analytic_circuit"]

    def test_requires_exactly_one_source(self, runner):
        result = runner.invoke(
            main, ["database", "--n", "3", "--shots", "10", "--seed", "1"]
        )
        assert result.exit_code == 2
        both = runner.invoke(
            main, ["database", "--n", "2", "--ring-alpha", "1", "--refs", '["1","2"]',
                   "--shots", "10", "--seed", "1"],
        )
        assert both.exit_code == 2

    def test_byte_identical_reruns(self, runner):
        args = ["database", "--n", "2", "--ring-alpha", "0.8", "--shots", "500", "--seed", "9"]
        assert runner.invoke(main, args).output == runner.invoke(main, args).output


class TestOptimizeT1:
    def test_equal_priors(self, runner):
        result = runner.invoke(main, ["optimize-t1", "--alpha1", "0", "--alpha2", "2"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["t1_star"] == pytest.approx(0.5, abs=1e-6)

    def test_reports_achieved_probability(self, runner):
        result = runner.invoke(
            main, ["optimize-t1", "--alpha1", "0", "--alpha2", "1", "--eta1", "0.5"]
        )
        payload = json.loads(result.output)
        assert payload["p_bs_at_optimum"] == pytest.approx(1 - math.exp(-1 / 3), abs=1e-9)

    def test_bad_amplitude_is_usage_error(self, runner):
        result = runner.invoke(main, ["optimize-t1", "--alpha1", "zzz", "--alpha2", "1"])
        assert result.exit_code == 2
