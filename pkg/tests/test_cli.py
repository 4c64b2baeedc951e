"""Command-line console: end-to-end flows against a temporary store."""

import json

import pytest
from click.testing import CliRunner

from bop2te import design_id_for
from bop2te.cli import main
from bop2te.serialize import spec_to_dict
from conftest import make_spec

SPEC1 = make_spec(0.50, 0.20, 0.10, 0.30)
SPEC4 = make_spec(0.60, 0.30, 0.20, 0.40)
BOUNDARIES4 = {"efficacy": [5, 14], "toxicity": [4, 7, 11]}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def store_env(workdir):
    return {"BOP2TE_STORE": str(workdir / "store.jsonl")}


@pytest.fixture(scope="module")
def spec1_config(workdir):
    path = workdir / "spec1.json"
    path.write_text(json.dumps(spec_to_dict(SPEC1)))
    return str(path)


@pytest.fixture(scope="module")
def spec4_config(workdir):
    path = workdir / "spec4.json"
    path.write_text(json.dumps(spec_to_dict(SPEC4)))
    return str(path)


@pytest.fixture(scope="module")
def saved_design4(store_env, spec4_config):
    """Design scenario 4 once and persist it for the decision-flow tests."""
    result = CliRunner().invoke(main, ["design", "--config", spec4_config], env=store_env)
    assert result.exit_code == 0, result.output
    return design_id_for(SPEC4)


class TestDesignCommand:
    def test_table_output_and_persistence(self, store_env, spec1_config):
        result = CliRunner().invoke(main, ["design", "--config", spec1_config], env=store_env)
        assert result.exit_code == 0, result.output
        assert "BOP2-TE" in result.output
        assert "stop if responses <=" in result.output
        assert f"saved as design {design_id_for(SPEC1)}" in result.output

    def test_json_output_carries_full_result(self, store_env, spec1_config):
        result = CliRunner().invoke(
            main, ["design", "--config", spec1_config, "--format", "json"], env=store_env
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["design_id"] == design_id_for(SPEC1)
        assert payload["result"]["boundaries"] == {"efficacy": [3, 10], "toxicity": [3, 5, 8]}
        assert payload["result"]["feasible"] is True

    def test_no_save_skips_store(self, store_env, spec1_config):
        result = CliRunner().invoke(
            main, ["design", "--config", spec1_config, "--no-save", "--format", "json"],
            env=store_env,
        )
        payload = json.loads(result.output)
        assert payload["design_id"] is None
        assert "saved as design" not in result.output

    def test_global_labels(self, store_env, spec1_config):
        result = CliRunner().invoke(
            main, ["design", "--config", spec1_config, "--global", "--no-save"], env=store_env
        )
        assert result.exit_code == 0, result.output
        assert "Global" in result.output and "Global*" not in result.output
        result = CliRunner().invoke(
            main,
            ["design", "--config", spec1_config, "--global", "--practical-constraint", "--no-save"],
            env=store_env,
        )
        assert "Global*" in result.output

    def test_out_writes_report_bundle(self, store_env, spec1_config, workdir):
        stem = str(workdir / "report")
        result = CliRunner().invoke(
            main, ["design", "--config", spec1_config, "--no-save", "--out", stem], env=store_env
        )
        assert result.exit_code == 0, result.output
        assert (workdir / "report.csv").exists()
        assert (workdir / "report.json").exists()
        assert (workdir / "report.png").read_bytes()[:4] == b"\x89PNG"

    def test_invalid_spec_reports_field(self, store_env, workdir):
        bad = dict(spec_to_dict(SPEC1), alpha_targets=[1.5, 0.1, 0.1])
        path = workdir / "bad.json"
        path.write_text(json.dumps(bad))
        result = CliRunner().invoke(main, ["design", "--config", str(path)], env=store_env)
        assert result.exit_code != 0
        assert "alpha_targets" in result.output


class TestOcCommand:
    def test_requires_exactly_one_source(self, store_env, spec4_config, saved_design4):
        result = CliRunner().invoke(main, ["oc"], env=store_env)
        assert result.exit_code != 0
        assert "give exactly one of --config or --design-id" in result.output
        result = CliRunner().invoke(
            main, ["oc", "--config", spec4_config, "--design-id", saved_design4], env=store_env
        )
        assert result.exit_code != 0

    def test_stored_design_oc(self, store_env, saved_design4):
        result = CliRunner().invoke(
            main, ["oc", "--design-id", saved_design4, "--format", "json"], env=store_env
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["boundaries"] == BOUNDARIES4
        assert payload["oc"]["h11"]["pcp"] == pytest.approx(0.8337, abs=5e-4)

    def test_config_with_explicit_boundaries(self, store_env, workdir):
        cfg = dict(spec_to_dict(SPEC4), boundaries=BOUNDARIES4)
        path = workdir / "oc_cfg.json"
        path.write_text(json.dumps(cfg))
        result = CliRunner().invoke(
            main, ["oc", "--config", str(path), "--format", "json"], env=store_env
        )
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["boundaries"] == BOUNDARIES4

    def test_mc_and_phi_grid_sections(self, store_env, saved_design4, workdir):
        stem = str(workdir / "phi_report")
        result = CliRunner().invoke(
            main,
            ["oc", "--design-id", saved_design4, "--mc", "200", "--seed", "5",
             "--phi-grid", "0.5,1,2", "--format", "json", "--out", stem],
            env=store_env,
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["mc"]["h11"]["replicates"] == 200
        assert payload["phi_curve"]["phi"] == [0.5, 1.0, 2.0]
        assert (workdir / "phi_report.csv").exists()
        assert (workdir / "phi_report.png").exists()
        assert (workdir / "phi_report.json").exists()

    def test_unknown_design_id(self, store_env):
        result = CliRunner().invoke(main, ["oc", "--design-id", "f" * 16], env=store_env)
        assert result.exit_code != 0
        assert "no design with id" in result.output


class TestDecideCommand:
    def test_go_decision(self, store_env, saved_design4):
        result = CliRunner().invoke(
            main,
            ["decide", "--design-id", saved_design4, "--n", "18",
             "--responses", "6", "--toxicities", "5"],
            env=store_env,
        )
        assert result.exit_code == 0, result.output
        assert result.output.startswith("decision: GO")

    def test_futility_no_go(self, store_env, saved_design4):
        result = CliRunner().invoke(
            main,
            ["decide", "--design-id", saved_design4, "--n", "18",
             "--responses", "5", "--toxicities", "5", "--format", "json"],
            env=store_env,
        )
        payload = json.loads(result.output)
        assert payload["decision"] == "no-go"
        assert payload["reasons"] == ["futility"]
        assert payload["boundary_efficacy"] == 5

    def test_dual_reason_no_go(self, store_env, saved_design4):
        result = CliRunner().invoke(
            main,
            ["decide", "--design-id", saved_design4, "--n", "36",
             "--responses", "14", "--toxicities", "12", "--format", "json"],
            env=store_env,
        )
        payload = json.loads(result.output)
        assert payload["decision"] == "no-go"
        assert payload["reasons"] == ["futility", "toxicity"]

    def test_non_look_n_rejected(self, store_env, saved_design4):
        result = CliRunner().invoke(
            main,
            ["decide", "--design-id", saved_design4, "--n", "10",
             "--responses", "4", "--toxicities", "2"],
            env=store_env,
        )
        assert result.exit_code != 0
        assert "not an analysis point" in result.output

    def test_recorded_decisions_enforce_schedule_order(self, store_env, saved_design4):
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["decide", "--design-id", saved_design4, "--n", "18",
             "--responses", "6", "--toxicities", "5", "--record"],
            env=store_env,
        )
        assert result.exit_code == 0, result.output
        result = runner.invoke(
            main,
            ["decide", "--design-id", saved_design4, "--n", "9",
             "--responses", "0", "--toxicities", "2", "--record"],
            env=store_env,
        )
        assert result.exit_code != 0
        assert "already holds n=18" in result.output


class TestProtocolCommand:
    def test_byte_identical_across_invocations(self, store_env, saved_design4):
        a = CliRunner().invoke(main, ["protocol", "--design-id", saved_design4], env=store_env)
        b = CliRunner().invoke(main, ["protocol", "--design-id", saved_design4], env=store_env)
        assert a.exit_code == 0 and a.output == b.output
        assert "TRIAL MONITORING PROTOCOL" in a.output

    def test_unknown_design(self, store_env):
        result = CliRunner().invoke(main, ["protocol", "--design-id", "f" * 16], env=store_env)
        assert result.exit_code != 0


class TestSimulateMultidoseCommand:
    def _config(self, workdir, **overrides):
        cfg = {
            "arms": ["dL", "dH"],
            "per_arm_design": spec_to_dict(SPEC4),
            "boundaries": BOUNDARIES4,
            "truth": [
                {"pi_e": 0.6, "pi_t": 0.1},
                {"pi_e": 0.6, "pi_t": 0.5},
            ],
            "replicates": 200,
            "seed": 7,
        }
        cfg.update(overrides)
        path = workdir / "dose.json"
        path.write_text(json.dumps(cfg))
        return str(path)

    def test_table_run(self, store_env, workdir):
        result = CliRunner().invoke(
            main, ["simulate-multidose", "--config", self._config(workdir)], env=store_env
        )
        assert result.exit_code == 0, result.output
        assert "dL" in result.output and "dH" in result.output
        assert "replicates: 200" in result.output

    def test_missing_truth(self, store_env, workdir):
        path = self._config(workdir)
        cfg = json.loads(open(path).read())
        del cfg["truth"]
        open(path, "w").write(json.dumps(cfg))
        result = CliRunner().invoke(main, ["simulate-multidose", "--config", path], env=store_env)
        assert result.exit_code != 0
        assert "truth: missing required field" in result.output

    def test_zero_replicates_rejected(self, store_env, workdir):
        result = CliRunner().invoke(
            main,
            ["simulate-multidose", "--config", self._config(workdir), "--replicates", "0"],
            env=store_env,
        )
        assert result.exit_code != 0
        assert "replicates" in result.output

    def test_single_arm_agrees_with_oc_mc_numbers(self, store_env, workdir, saved_design4):
        # the one-arm simulation and the oc command's Monte Carlo check share
        # the same stream, so the JSON numbers must agree exactly
        cfg = self._config(
            workdir,
            arms=["only"],
            truth=[{"pi_e": 0.6, "pi_t": 0.2}],
            replicates=300,
            seed=12,
        )
        sim = CliRunner().invoke(
            main, ["simulate-multidose", "--config", cfg, "--format", "json"], env=store_env
        )
        assert sim.exit_code == 0, sim.output
        arm = json.loads(sim.output)["result"]["arms"][0]
        oc = CliRunner().invoke(
            main,
            ["oc", "--design-id", saved_design4, "--mc", "300", "--seed", "12",
             "--format", "json"],
            env=store_env,
        )
        assert oc.exit_code == 0, oc.output
        mc_h11 = json.loads(oc.output)["mc"]["h11"]
        assert arm["selection_pct"] == 100.0 * mc_h11["pcp"]
        assert arm["early_stop_pct"] == 100.0 * mc_h11["pet"]
        assert arm["average_enrolled"] == mc_h11["ess"]
