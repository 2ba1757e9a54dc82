"""Batch front door: parse scenario or calibration configs, run campaigns,
and emit machine-readable tables.

Configs are YAML trees.  Raw outcome units (prior parameters, drifts, effect
sizes) are divided by the model's known standard deviation at parse time;
effect summaries in the emitted tables are multiplied back, so tables are in
outcome units.  Outputs carry no timestamps: a rerun of the same manifest is
byte-identical, whatever the worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import yaml

from .adaptive_design import DESIGN1, DESIGN2, DesignConfig
from .calibration import (
    CalibrationGrid,
    CalibrationReport,
    borrowing_probability,
    select_design_params,
)
from .distributions import (
    BETA,
    BINARY,
    CONTINUOUS,
    NORMAL,
    NumericsError,
    OutcomeModel,
    PriorSpec,
)
from .similarity import EXACT, PRIOR_MEAN_APPROX, SimilarityConfig
from .trial_engine import OperatingCharacteristics, Scenario, run_campaign

__all__ = [
    "ConfigError",
    "RunManifest",
    "ParsedConfig",
    "CalibrationPlan",
    "CampaignResults",
    "CalibrationResults",
    "parse_config",
    "emit_reports",
    "run",
    "main",
]

MODES = ("simulate", "compare", "calibrate")

NULL_HYPOTHESIS = "null"
ALTERNATIVE = "alternative"

RESULT_COLUMNS = (
    "d", "t", "gamma", "lambda",
    "power_diff", "typeI_diff", "mean_saved", "bias", "ci_length",
    "power_diff_se", "typeI_diff_se", "mean_saved_se", "bias_se", "ci_length_se",
)


class ConfigError(ValueError):
    """A config violates the schema; the message carries the key path."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class RunManifest:
    config_path: Path
    output_dir: Path
    mode: str | None = None
    master_seed: int | None = None
    worker_count: int = 1
    reps_override: int | None = None


@dataclass(frozen=True)
class CalibrationPlan:
    grid: CalibrationGrid
    design_template: DesignConfig
    historical_prior: PriorSpec
    model: OutcomeModel


@dataclass(frozen=True)
class ParsedConfig:
    mode: str
    model: OutcomeModel
    scenarios: tuple[Scenario, ...] | None
    calibration: CalibrationPlan | None
    echo: dict
    paired_comparator: bool = True


@dataclass(frozen=True)
class CampaignResults:
    config: ParsedConfig
    characteristics: tuple[OperatingCharacteristics, ...]


@dataclass(frozen=True)
class CalibrationResults:
    config: ParsedConfig
    report: CalibrationReport
    # (raw delta, t, gamma, probability) rows for the reporting table
    table: tuple[tuple[float, float, float, float], ...]


# ---------------------------------------------------------------------------
# Schema helpers
# ---------------------------------------------------------------------------


def _expect_mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(path, "expected a mapping")
    return value


def _get(d: dict, key: str, path: str, required: bool = True, default: Any = None) -> Any:
    if key not in d:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    return d[key]


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ConfigError(path, "must be finite")
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return value


def _number_list(value: Any, path: str) -> list[float]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(path, "expected a list of numbers")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _numbers_or_number(value: Any, path: str) -> list[float]:
    if isinstance(value, (list, tuple)):
        return _number_list(value, path)
    return [_number(value, path)]


# ---------------------------------------------------------------------------
# Domain-object builders
# ---------------------------------------------------------------------------


def _build_model(raw: Any) -> OutcomeModel:
    d = _expect_mapping(raw, "model")
    kind = _get(d, "kind", "model")
    if kind not in (CONTINUOUS, BINARY):
        raise ConfigError("model.kind", f"must be '{CONTINUOUS}' or '{BINARY}'")
    known_sd = _number(_get(d, "known_sd", "model", required=False, default=1.0),
                       "model.known_sd")
    try:
        return OutcomeModel(kind, known_sd)
    except ValueError as exc:
        raise ConfigError("model", str(exc)) from exc


def _build_prior(raw: Any, path: str, model: OutcomeModel) -> PriorSpec:
    d = _expect_mapping(raw, path)
    family = _get(d, "family", path)
    expected = NORMAL if model.kind == CONTINUOUS else BETA
    if family != expected:
        raise ConfigError(f"{path}.family",
                          f"must be '{expected}' for a {model.kind} endpoint")
    comps_raw = _get(d, "components", path)
    if not isinstance(comps_raw, list) or not comps_raw:
        raise ConfigError(f"{path}.components", "expected a nonempty list")
    triples = []
    for i, c in enumerate(comps_raw):
        cpath = f"{path}.components[{i}]"
        cm = _expect_mapping(c, cpath)
        w = _number(_get(cm, "weight", cpath, required=False, default=1.0), f"{cpath}.weight")
        mean = _number(_get(cm, "mean", cpath), f"{cpath}.mean")
        if family == NORMAL:
            scale = _number(_get(cm, "sd", cpath), f"{cpath}.sd")
            triples.append((w, mean / model.known_sd, scale / model.known_sd))
        else:
            scale = _number(_get(cm, "precision", cpath), f"{cpath}.precision")
            triples.append((w, mean, scale))
    try:
        return PriorSpec.mixture(family, triples)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _build_similarity(d: dict, path: str) -> SimilarityConfig:
    gamma = _number(_get(d, "gamma", path, required=False, default=0.3), f"{path}.gamma")
    mode = _get(d, "hmin_mode", path, required=False, default=EXACT)
    if mode not in (EXACT, PRIOR_MEAN_APPROX):
        raise ConfigError(f"{path}.hmin_mode",
                          f"must be '{EXACT}' or '{PRIOR_MEAN_APPROX}'")
    transform = _get(d, "transform", path, required=False, default="identity")
    try:
        return SimilarityConfig(gamma=gamma, transform=transform, hmin_mode=mode)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _build_design(raw: Any, t: float, model: OutcomeModel) -> DesignConfig:
    d = _expect_mapping(raw, "design")
    variant = _get(d, "variant", "design")
    if variant not in (DESIGN1, DESIGN2):
        raise ConfigError("design.variant", f"must be '{DESIGN1}' or '{DESIGN2}'")
    try:
        return DesignConfig(
            variant=variant,
            n_total=_integer(_get(d, "n_total", "design"), "design.n_total"),
            allocation_ratio=_number(
                _get(d, "allocation_ratio", "design", required=False, default=1.0),
                "design.allocation_ratio"),
            t=t,
            lam=_number(_get(d, "lambda", "design", required=False, default=1.0),
                        "design.lambda"),
            eta=_number(_get(d, "eta", "design", required=False, default=0.975),
                        "design.eta"),
            similarity=_build_similarity(d, "design"),
            stage1_ratio=_number(
                _get(d, "stage1_ratio", "design", required=False, default=1.0),
                "design.stage1_ratio"),
            binary_simple_fallback=bool(
                _get(d, "binary_simple_fallback", "design", required=False, default=False)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("design", str(exc)) from exc


def _design_t_values(raw_design: Any) -> list[float]:
    d = _expect_mapping(raw_design, "design")
    return _numbers_or_number(_get(d, "t", "design"), "design.t")


def _normalize_hypotheses(value: Any) -> list[str]:
    if value is None:
        return [NULL_HYPOTHESIS, ALTERNATIVE]
    if not isinstance(value, list) or not value:
        raise ConfigError("truth.hypotheses", "expected a nonempty list")
    out: list[str] = []
    for i, item in enumerate(value):
        name = NULL_HYPOTHESIS if item is None else str(item).lower()
        if name in ("null", "h0", "type1"):
            name = NULL_HYPOTHESIS
        elif name in ("alternative", "alt", "h1", "power"):
            name = ALTERNATIVE
        else:
            raise ConfigError(f"truth.hypotheses[{i}]", f"unknown hypothesis {item!r}")
        if name not in out:
            out.append(name)
    return out


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def _expit(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def _effect_fn(raw: Any, model: OutcomeModel):
    """Returns theta_treatment(theta_control) for the alternative hypothesis."""
    if model.kind == CONTINUOUS:
        effect = _number(raw, "truth.effect") / model.known_sd
        return lambda theta_c: theta_c + effect
    d = _expect_mapping(raw, "truth.effect")
    p_c = _number(_get(d, "control", "truth.effect"), "truth.effect.control")
    p_t = _number(_get(d, "treatment", "truth.effect"), "truth.effect.treatment")
    for key, p in (("control", p_c), ("treatment", p_t)):
        if not (0.0 < p < 1.0):
            raise ConfigError(f"truth.effect.{key}", "must lie in (0, 1)")
    # effect fixed on the log-odds scale as the control response varies
    shift = _logit(p_t) - _logit(p_c)
    return lambda theta_c: _expit(shift + _logit(theta_c))


def _build_scenarios(data: dict, model: OutcomeModel) -> tuple[Scenario, ...]:
    priors = _expect_mapping(_get(data, "priors", "<root>"), "priors")
    historical = _build_prior(_get(priors, "historical_control", "priors"),
                              "priors.historical_control", model)
    treatment_prior = _build_prior(_get(priors, "treatment", "priors"),
                                   "priors.treatment", model)

    truth = _expect_mapping(_get(data, "truth", "<root>", required=False, default={}), "truth")
    drift_raw = _get(truth, "drift_grid", "truth", required=False, default=None)
    drifts = _number_list(drift_raw, "truth.drift_grid") if drift_raw else [0.0]
    hypotheses = _normalize_hypotheses(_get(truth, "hypotheses", "truth",
                                            required=False, default=None))
    effect_fn = None
    if ALTERNATIVE in hypotheses:
        effect_raw = _get(truth, "effect", "truth")
        effect_fn = _effect_fn(effect_raw, model)

    replications = _integer(_get(data, "replications", "<root>"), "replications")
    if replications < 1:
        raise ConfigError("replications", "must be >= 1")
    seed = _integer(_get(data, "seed", "<root>"), "seed")
    if seed < 0:
        raise ConfigError("seed", "must be >= 0")

    t_values = _design_t_values(_get(data, "design", "<root>"))
    m_hist = historical.mean()
    scenarios: list[Scenario] = []
    for t in t_values:
        design = _build_design(data["design"], t, model)
        for i, d_raw in enumerate(drifts):
            d_working = d_raw / model.known_sd if model.kind == CONTINUOUS else d_raw
            theta_c = m_hist + d_working
            if model.kind == BINARY and not (0.0 < theta_c < 1.0):
                raise ConfigError(
                    f"truth.drift_grid[{i}]",
                    f"drift {d_raw} puts the control probability at {theta_c}, outside (0, 1)",
                )
            for hyp in hypotheses:
                theta_t = theta_c if hyp == NULL_HYPOTHESIS else effect_fn(theta_c)
                try:
                    scenarios.append(Scenario(
                        model=model,
                        theta_control=theta_c,
                        theta_treatment=theta_t,
                        historical_prior=historical,
                        treatment_prior=treatment_prior,
                        design=design,
                        replications=replications,
                        seed=seed,
                    ))
                except ValueError as exc:
                    raise ConfigError(f"truth.drift_grid[{i}]", str(exc)) from exc
    return tuple(scenarios)


def _build_calibration(data: dict, model: OutcomeModel) -> CalibrationPlan:
    priors = _expect_mapping(_get(data, "priors", "<root>"), "priors")
    historical = _build_prior(_get(priors, "historical_control", "priors"),
                              "priors.historical_control", model)
    cal = _expect_mapping(_get(data, "calibration", "<root>"), "calibration")
    t_values = _number_list(_get(cal, "t_values", "calibration"), "calibration.t_values")
    gamma_values = _number_list(_get(cal, "gamma_values", "calibration"),
                                "calibration.gamma_values")
    scale = model.known_sd if model.kind == CONTINUOUS else 1.0
    delta_star = _number(_get(cal, "delta_star", "calibration"),
                         "calibration.delta_star") / scale
    epsilon = _number(_get(cal, "epsilon", "calibration"), "calibration.epsilon")
    table_raw = _get(cal, "table_delta_stars", "calibration", required=False, default=None)
    table = tuple(_number_list(table_raw, "calibration.table_delta_stars")) if table_raw else ()
    replications = _integer(
        _get(cal, "replications", "calibration", required=False,
             default=_get(data, "replications", "<root>")),
        "calibration.replications")
    seed = _integer(
        _get(cal, "seed", "calibration", required=False,
             default=_get(data, "seed", "<root>")),
        "calibration.seed")
    try:
        grid = CalibrationGrid(
            t_values=tuple(t_values),
            gamma_values=tuple(gamma_values),
            delta_star=delta_star,
            epsilon=epsilon,
            replications=replications,
            seed=seed,
            table_delta_stars=table,
        )
    except ValueError as exc:
        raise ConfigError("calibration", str(exc)) from exc
    template = _build_design(data["design"], t_values[0], model)
    return CalibrationPlan(grid=grid, design_template=template,
                           historical_prior=historical, model=model)


def parse_config(text: str) -> ParsedConfig:
    """Parse and fully validate a YAML config into domain objects.

    Schema violations raise :class:`ConfigError` with the offending key path.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<document>", f"not valid YAML: {exc}") from exc
    data = _expect_mapping(data, "<root>")

    mode = _get(data, "mode", "<root>", required=False, default="simulate")
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {MODES}")
    model = _build_model(_get(data, "model", "<root>"))

    if mode == "calibrate":
        plan = _build_calibration(data, model)
        return ParsedConfig(mode=mode, model=model, scenarios=None,
                            calibration=plan, echo=data)

    comparator = _get(data, "comparator", "<root>", required=False, default="paired")
    if comparator not in ("paired", "none"):
        raise ConfigError("comparator", "must be 'paired' or 'none'")
    scenarios = _build_scenarios(data, model)
    return ParsedConfig(mode=mode, model=model, scenarios=scenarios,
                        calibration=None, echo=data,
                        paired_comparator=comparator == "paired")


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _scenario_record(scenario: Scenario, oc: OperatingCharacteristics,
                     model: OutcomeModel) -> dict:
    scale = model.known_sd
    hyp = NULL_HYPOTHESIS if scenario.theta_treatment == scenario.theta_control else ALTERNATIVE
    return {
        "d": scenario.drift * (scale if model.kind == CONTINUOUS else 1.0),
        "t": scenario.design.t,
        "gamma": scenario.design.similarity.gamma,
        "lambda": scenario.design.lam,
        "hypothesis": hyp,
        "replications": oc.replications,
        "rejection_rate": oc.rejection_rate,
        "rejection_rate_se": oc.rejection_rate_se,
        "mean_bias_delta": oc.mean_bias_delta * scale,
        "mean_bias_delta_se": oc.mean_bias_delta_se * scale,
        "mean_bias_control": oc.mean_bias_control * scale,
        "mean_bias_control_se": oc.mean_bias_control_se * scale,
        "mean_saved": oc.mean_saved,
        "mean_saved_se": oc.mean_saved_se,
        "mean_ci_length": oc.mean_ci_length * scale,
        "mean_ci_length_se": oc.mean_ci_length_se * scale,
        "comparator_rejection_rate": oc.comparator_rejection_rate,
        "comparator_rejection_rate_se": oc.comparator_rejection_rate_se,
        "rejection_rate_diff": oc.rejection_rate_diff,
        "rejection_rate_diff_se": oc.rejection_rate_diff_se,
    }


def _campaign_rows(results: CampaignResults) -> list[list[Any]]:
    """One row per (t, d) grid point, merging the null and alternative runs."""
    model = results.config.model
    groups: dict[tuple[float, float], dict[str, Any]] = {}
    order: list[tuple[float, float]] = []
    for scenario, oc in zip(results.config.scenarios, results.characteristics):
        rec = _scenario_record(scenario, oc, model)
        key = (round(rec["t"], 12), round(rec["d"], 12))
        if key not in groups:
            groups[key] = {"gamma": rec["gamma"], "lambda": rec["lambda"]}
            order.append(key)
        groups[key][rec["hypothesis"]] = rec

    rows = []
    for key in order:
        g = groups[key]
        null_rec = g.get(NULL_HYPOTHESIS)
        alt_rec = g.get(ALTERNATIVE)
        base = null_rec or alt_rec
        rows.append([
            key[1], key[0], g["gamma"], g["lambda"],
            alt_rec["rejection_rate_diff"] if alt_rec else None,
            null_rec["rejection_rate_diff"] if null_rec else None,
            base["mean_saved"],
            base["mean_bias_delta"],
            base["mean_ci_length"],
            alt_rec["rejection_rate_diff_se"] if alt_rec else None,
            null_rec["rejection_rate_diff_se"] if null_rec else None,
            base["mean_saved_se"],
            base["mean_bias_delta_se"],
            base["mean_ci_length_se"],
        ])
    return rows


def emit_reports(results: CampaignResults | CalibrationResults, output_dir: Path) -> list[Path]:
    """Write the mode's tables plus a config-echoing summary; returns paths."""
    output_dir = Path(output_dir)
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RuntimeError(f"cannot create output directory {output_dir}: {exc}") from exc

    written: list[Path] = []
    if isinstance(results, CalibrationResults):
        cal_path = output_dir / "calibration.csv"
        rows: list[Sequence[Any]] = [
            ("borrowing_prob", d_raw, t, gamma, prob)
            for d_raw, t, gamma, prob in results.table
        ]
        scale = (results.config.model.known_sd
                 if results.config.model.kind == CONTINUOUS else 1.0)
        for cell in results.report.cells:
            rows.append(("borrowing_prob_at_mad",
                         results.config.calibration.grid.delta_star * scale,
                         cell.t, cell.gamma, cell.borrowing_prob))
        for cell in results.report.cells:
            rows.append(("mean_saved", 0.0, cell.t, cell.gamma, cell.mean_saved))
        _write_csv(cal_path, ("quantity", "delta_star", "t", "gamma", "value"), rows)
        written.append(cal_path)

        summary = {
            "mode": results.config.mode,
            "config": results.config.echo,
            "cells": [
                {"t": c.t, "gamma": c.gamma, "borrowing_prob": c.borrowing_prob,
                 "mean_saved": c.mean_saved, "admissible": c.admissible}
                for c in results.report.cells
            ],
            "admissible": [
                [c.t, c.gamma] for c in results.report.cells if c.admissible
            ],
            "selected": list(results.report.selected) if results.report.selected else None,
            "diagnostic": results.report.diagnostic,
        }
        summary_path = output_dir / "summary.json"
        _write_json(summary_path, summary)
        written.append(summary_path)
        return written

    results_path = output_dir / "results.csv"
    _write_csv(results_path, RESULT_COLUMNS, _campaign_rows(results))
    written.append(results_path)

    records = [
        _scenario_record(s, oc, results.config.model)
        for s, oc in zip(results.config.scenarios, results.characteristics)
    ]
    if results.config.mode == "compare":
        rates_path = output_dir / "rates.csv"
        _write_csv(
            rates_path,
            ("d", "t", "gamma", "lambda", "hypothesis",
             "design_rate", "design_rate_se", "comparator_rate", "comparator_rate_se",
             "rate_diff", "rate_diff_se"),
            [(r["d"], r["t"], r["gamma"], r["lambda"], r["hypothesis"],
              r["rejection_rate"], r["rejection_rate_se"],
              r["comparator_rejection_rate"], r["comparator_rejection_rate_se"],
              r["rejection_rate_diff"], r["rejection_rate_diff_se"]) for r in records],
        )
        written.append(rates_path)

    # execution details like the worker count stay out of the summary so a
    # rerun of the same config is byte-identical whatever the parallelism
    summary = {
        "mode": results.config.mode,
        "config": results.config.echo,
        "scenarios": records,
    }
    summary_path = output_dir / "summary.json"
    _write_json(summary_path, summary)
    written.append(summary_path)
    return written


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def _calibration_table(plan: CalibrationPlan) -> tuple[tuple[float, float, float, float], ...]:
    grid = plan.grid
    scale = plan.model.known_sd if plan.model.kind == CONTINUOUS else 1.0
    rows: list[tuple[float, float, float, float]] = []
    for di, d_raw in enumerate(grid.table_delta_stars):
        for ti, t in enumerate(grid.t_values):
            for gi, gamma in enumerate(grid.gamma_values):
                design = replace(
                    plan.design_template, t=t,
                    similarity=replace(plan.design_template.similarity, gamma=gamma),
                )
                prob = borrowing_probability(
                    design, plan.historical_prior, plan.model, d_raw / scale,
                    grid.replications,
                    np.random.default_rng(np.random.SeedSequence([grid.seed, ti, gi, 3, di])),
                )
                rows.append((d_raw, t, gamma, prob))
    return tuple(rows)


def run(manifest: RunManifest) -> list[Path]:
    """Execute a manifest end-to-end and return the written report paths."""
    text = Path(manifest.config_path).read_text(encoding="utf-8")
    data = yaml.safe_load(text)
    data = _expect_mapping(data, "<root>")
    if manifest.mode is not None:
        data["mode"] = manifest.mode
    if manifest.master_seed is not None:
        data["seed"] = manifest.master_seed
        if isinstance(data.get("calibration"), dict):
            data["calibration"].pop("seed", None)
    if manifest.reps_override is not None:
        data["replications"] = manifest.reps_override
        if isinstance(data.get("calibration"), dict):
            data["calibration"].pop("replications", None)
    config = parse_config(yaml.safe_dump(data))

    if config.mode == "calibrate":
        plan = config.calibration
        report = select_design_params(
            plan.grid, plan.design_template, plan.historical_prior, plan.model
        )
        results: CampaignResults | CalibrationResults = CalibrationResults(
            config=config, report=report, table=_calibration_table(plan)
        )
    else:
        ocs = run_campaign(
            list(config.scenarios),
            paired_comparator=config.paired_comparator,
            workers=manifest.worker_count,
        )
        results = CampaignResults(config=config, characteristics=tuple(ocs))
    return emit_reports(results, manifest.output_dir)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hctrial",
        description="Simulate and calibrate two-stage hybrid-control trial designs.",
    )
    parser.add_argument("--config", required=True, help="YAML config file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--mode", choices=MODES, default=None,
                        help="override the config's mode")
    parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    parser.add_argument("--workers", type=int, default=1, help="parallel workers")
    parser.add_argument("--reps-override", type=int, default=None,
                        help="override the replication count")
    args = parser.parse_args(argv)

    manifest = RunManifest(
        config_path=Path(args.config),
        output_dir=Path(args.out),
        mode=args.mode,
        master_seed=args.seed,
        worker_count=max(1, args.workers),
        reps_override=args.reps_override,
    )
    try:
        written = run(manifest)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4
    for path in written:
        print(path)
    return 0


def entrypoint() -> None:
    sys.exit(main())
