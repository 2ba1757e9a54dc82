import json
import math
from pathlib import Path

import pytest
import yaml

from hctrial.cli import (
    RESULT_COLUMNS,
    ConfigError,
    RunManifest,
    main,
    parse_config,
    run,
)

MAIN_GRID_CONFIG = """
mode: simulate
model: {kind: continuous, known_sd: 1.0}
design:
  variant: design1
  n_total: 200
  allocation_ratio: 1.0
  t: [0.3, 0.4, 0.5, 0.6]
  gamma: 0.3
  lambda: 1.0
  eta: 0.975
priors:
  historical_control:
    family: normal
    components: [{weight: 1.0, mean: 0.0, sd: 0.11952286093343936}]
  treatment:
    family: normal
    components: [{weight: 1.0, mean: 0.0, sd: 1.0}]
truth:
  drift_grid: [-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4]
  effect: 0.4
  hypotheses: [alternative]
replications: 5000
seed: 20260809
"""

SMALL_CONFIG = """
mode: simulate
model: {kind: continuous}
design:
  variant: design1
  n_total: 40
  t: [0.5]
  gamma: 0.3
priors:
  historical_control:
    family: normal
    components: [{weight: 1.0, mean: 0.0, sd: 0.25}]
  treatment:
    family: normal
    components: [{weight: 1.0, mean: 0.0, sd: 1.0}]
truth:
  drift_grid: [-0.2, 0.2]
  effect: 0.4
replications: 40
seed: 7
"""

CALIBRATE_CONFIG = """
mode: calibrate
model: {kind: continuous, known_sd: 88.0}
design:
  variant: design1
  n_total: 80
  t: 0.4
  gamma: 0.2
priors:
  historical_control:
    family: normal
    components: [{weight: 1.0, mean: -50.0, sd: 18.0}]
  treatment:
    family: normal
    components: [{weight: 1.0, mean: 0.0, sd: 88.0}]
calibration:
  t_values: [0.4, 0.6]
  gamma_values: [0.2]
  delta_star: 40.0
  epsilon: 0.15
  table_delta_stars: [0.0, 40.0]
replications: 400
seed: 3
"""


class TestParseConfig:
    def test_main_grid_shape(self):
        cfg = parse_config(MAIN_GRID_CONFIG)
        assert cfg.mode == "simulate"
        assert len(cfg.scenarios) == 4 * 9
        first = cfg.scenarios[0]
        assert first.design.t == 0.3
        assert first.design.lam == 1.0
        assert first.design.similarity.gamma == 0.3
        assert first.replications == 5000
        assert first.historical_prior.components[0].scale == pytest.approx(
            1 / math.sqrt(70), rel=1e-9
        )
        # drift grid expands t-major, alternative effect applied
        assert first.theta_control == pytest.approx(-0.4)
        assert first.theta_treatment == pytest.approx(0.0)

    def test_both_hypotheses_double_the_list(self):
        text = MAIN_GRID_CONFIG.replace("hypotheses: [alternative]",
                                        "hypotheses: [null, alternative]")
        cfg = parse_config(text)
        assert len(cfg.scenarios) == 2 * 4 * 9

    def test_unnormalized_mixture_names_the_prior(self):
        bad = SMALL_CONFIG.replace(
            "components: [{weight: 1.0, mean: 0.0, sd: 0.25}]",
            "components: [{weight: 0.6, mean: 0.0, sd: 0.25}, {weight: 0.3, mean: 0.1, sd: 0.5}]",
        )
        with pytest.raises(ConfigError, match="historical_control"):
            parse_config(bad)

    def test_missing_key_path_reported(self):
        with pytest.raises(ConfigError, match="design.n_total"):
            parse_config(SMALL_CONFIG.replace("  n_total: 40\n", ""))

    def test_empty_drift_grid_defaults_to_zero(self):
        text = SMALL_CONFIG.replace("drift_grid: [-0.2, 0.2]", "drift_grid: []")
        cfg = parse_config(text)
        assert len(cfg.scenarios) == 2  # null + alternative at d = 0
        assert all(s.theta_control == 0.0 for s in cfg.scenarios)

    def test_known_sd_scales_priors_and_effect(self):
        text = SMALL_CONFIG.replace("model: {kind: continuous}",
                                    "model: {kind: continuous, known_sd: 2.0}")
        cfg = parse_config(text)
        hist = cfg.scenarios[0].historical_prior.components[0]
        assert hist.scale == pytest.approx(0.125)
        alts = [s for s in cfg.scenarios if s.theta_treatment != s.theta_control]
        assert alts[0].true_delta == pytest.approx(0.2)
        assert alts[0].theta_control == pytest.approx(-0.1)

    def test_binary_effect_fixed_on_log_odds(self):
        text = """
mode: simulate
model: {kind: binary}
design: {variant: design1, n_total: 180, t: 0.3, gamma: 0.3}
priors:
  historical_control:
    family: beta
    components: [{weight: 1.0, mean: 0.3, precision: 65.0}]
  treatment:
    family: beta
    components: [{weight: 1.0, mean: 0.5, precision: 1.0}]
truth:
  drift_grid: [0.0, 0.1]
  effect: {control: 0.3, treatment: 0.5}
  hypotheses: [alternative]
replications: 10
seed: 1
"""
        cfg = parse_config(text)
        s0, s1 = cfg.scenarios
        assert s0.theta_treatment == pytest.approx(0.5)
        shift = math.log(0.5 / 0.5) - math.log(0.3 / 0.7)
        want = 1 / (1 + math.exp(-(shift + math.log(0.4 / 0.6))))
        assert s1.theta_treatment == pytest.approx(want)

    def test_mode_must_be_known(self):
        with pytest.raises(ConfigError, match="mode"):
            parse_config(SMALL_CONFIG.replace("mode: simulate", "mode: explore"))

    def test_calibration_parse(self):
        cfg = parse_config(CALIBRATE_CONFIG)
        assert cfg.mode == "calibrate"
        grid = cfg.calibration.grid
        assert grid.delta_star == pytest.approx(40.0 / 88.0)
        assert grid.table_delta_stars == (0.0, 40.0)
        assert cfg.calibration.historical_prior.mean() == pytest.approx(-50.0 / 88.0)


class TestRoundTrip:
    def test_parse_of_emitted_echo_reproduces_objects(self, tmp_path):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(SMALL_CONFIG)
        out = tmp_path / "out"
        run(RunManifest(config_path=cfg_path, output_dir=out))
        echo = json.loads((out / "summary.json").read_text())["config"]
        reparsed = parse_config(yaml.safe_dump(echo))
        original = parse_config(SMALL_CONFIG)
        assert reparsed.scenarios == original.scenarios
        assert reparsed.mode == original.mode


class TestEmitReports:
    def test_results_columns_exact(self, tmp_path):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(SMALL_CONFIG)
        out = tmp_path / "out"
        run(RunManifest(config_path=cfg_path, output_dir=out))
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == ",".join(RESULT_COLUMNS)
        # one row per (t, d) grid point
        assert len(lines) == 1 + 2
        assert not (out / "rates.csv").exists()

    def test_compare_mode_adds_rates_table(self, tmp_path):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(SMALL_CONFIG)
        out = tmp_path / "out"
        run(RunManifest(config_path=cfg_path, output_dir=out, mode="compare"))
        rates = (out / "rates.csv").read_text().splitlines()
        assert rates[0].startswith("d,t,gamma,lambda,hypothesis,design_rate")
        assert len(rates) == 1 + 4  # 2 drifts x 2 hypotheses

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(SMALL_CONFIG)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run(RunManifest(config_path=cfg_path, output_dir=out_a))
        run(RunManifest(config_path=cfg_path, output_dir=out_b))
        for name in ("results.csv", "summary.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(SMALL_CONFIG)
        out_a, out_b = tmp_path / "w1", tmp_path / "w2"
        run(RunManifest(config_path=cfg_path, output_dir=out_a, worker_count=1))
        run(RunManifest(config_path=cfg_path, output_dir=out_b, worker_count=2))
        assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()

    def test_seed_override_changes_results(self, tmp_path):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(SMALL_CONFIG)
        out_a, out_b = tmp_path / "s7", tmp_path / "s8"
        run(RunManifest(config_path=cfg_path, output_dir=out_a))
        run(RunManifest(config_path=cfg_path, output_dir=out_b, master_seed=8))
        assert (out_a / "results.csv").read_bytes() != (out_b / "results.csv").read_bytes()
        echo = json.loads((out_b / "summary.json").read_text())["config"]
        assert echo["seed"] == 8

    def test_calibration_outputs(self, tmp_path):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(CALIBRATE_CONFIG)
        out = tmp_path / "cal"
        run(RunManifest(config_path=cfg_path, output_dir=out))
        rows = (out / "calibration.csv").read_text().splitlines()
        assert rows[0] == "quantity,delta_star,t,gamma,value"
        kinds = {line.split(",")[0] for line in rows[1:]}
        assert kinds == {"borrowing_prob", "borrowing_prob_at_mad", "mean_saved"}
        # 2 table drifts x 2 t x 1 gamma + 2 MAD cells + 2 saved cells
        assert len(rows) == 1 + 4 + 2 + 2
        summary = json.loads((out / "summary.json").read_text())
        assert summary["selected"] is not None


class TestMain:
    def test_happy_path_exit_zero(self, tmp_path, capsys):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(SMALL_CONFIG)
        rc = main(["--config", str(cfg_path), "--out", str(tmp_path / "out")])
        assert rc == 0
        assert "results.csv" in capsys.readouterr().out

    def test_config_error_exit_two(self, tmp_path, capsys):
        cfg_path = tmp_path / "bad.yaml"
        cfg_path.write_text(SMALL_CONFIG.replace("  n_total: 40\n", ""))
        rc = main(["--config", str(cfg_path), "--out", str(tmp_path / "out")])
        assert rc == 2
        assert "design.n_total" in capsys.readouterr().err

    def test_reps_override(self, tmp_path):
        cfg_path = tmp_path / "config.yaml"
        cfg_path.write_text(SMALL_CONFIG)
        out = tmp_path / "out"
        rc = main(["--config", str(cfg_path), "--out", str(out), "--reps-override", "10"])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert all(s["replications"] == 10 for s in summary["scenarios"])
