"""JSON-configured command line interface.

Three subcommands: ``solve`` (single operating points), ``sweep``
(parameter sweeps over power, rate, or outage margin, with presets
matching the reference figure setups), and ``validate`` (Monte Carlo
check of the analytic outage). All output is CSV with a fixed schema and
deterministic formatting: the same config and seed produce byte-identical
files.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import solver
from .model import (
    LinkGeometry,
    SystemParams,
    default_geometry,
    geometry_from_positions,
    thermal_noise_psd,
)
from .outage import gamma_for_outage, outage_model
from .phys import LOS, NLOS
from .solver import ES, TS, FeasibilityResult
from .validate import McConfig, empirical_outage_curve
from .model import derive_constants

SOLVE_HEADER = (
    "axis,scheme,condition,m_reflect,m_harvest,m_total,m_total_int,tau,"
    "rate_slack,ss_slack,outage_slack,error"
)
VALIDATE_HEADER = (
    "m,gamma,target_outage,empirical_outage,analytic_outage,abs_gap,"
    "binomial_stderr,ks_distance"
)

AXES = ("power", "rate", "outage_margin")


class ConfigError(ValueError):
    """Configuration problem, reported with the offending field path."""


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


@dataclass(frozen=True)
class RunConfig:
    """Validated run description shared by all subcommands."""

    params: SystemParams
    geom: LinkGeometry
    schemes: Tuple[str, ...]
    condition: str
    rates: Tuple[float, ...]
    epsilons: Tuple[float, ...]
    powers: Tuple[float, ...]
    sweep_axis: Optional[str]
    output_path: Optional[str]
    mc: McConfig
    validate_m: Tuple[int, ...]
    validate_points: Tuple[float, ...]
    with_ks: bool
    strict: bool = False


_PARAM_KEYS = {
    "carrier_freq_hz",
    "bandwidth_hz",
    "noise_psd_w_per_hz",
    "num_bs_antennas",
    "harvest_efficiency",
    "element_power_w",
    "tx_power_w",
    "area_side_m",
}


def _parse_params(doc: dict) -> SystemParams:
    doc = dict(doc or {})
    noise_figure = doc.pop("noise_figure_db", None)
    unknown = set(doc) - _PARAM_KEYS
    if unknown:
        raise ConfigError(f"params: unknown fields {sorted(unknown)}")
    if noise_figure is not None:
        if "noise_psd_w_per_hz" in doc:
            raise ConfigError(
                "params: give either noise_psd_w_per_hz or noise_figure_db, not both"
            )
        doc["noise_psd_w_per_hz"] = thermal_noise_psd(float(noise_figure))
    try:
        return SystemParams(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"params: {exc}") from exc


def _parse_geometry(doc, params: SystemParams) -> LinkGeometry:
    if doc is None:
        return default_geometry(params.area_side_m)
    if not isinstance(doc, dict):
        raise ConfigError("geometry: expected an object")
    doc = dict(doc)
    try:
        if {"bs", "ue", "ris"} <= set(doc):
            normal = doc.pop("normal", (0.0, 1.0))
            geom = geometry_from_positions(doc.pop("bs"), doc.pop("ue"), doc.pop("ris"), normal)
            if doc:
                raise ConfigError(f"geometry: unknown fields {sorted(doc)}")
            return geom
        required = {"psi_deg", "theta_deg", "d_sr_m", "d_rd_m"}
        if set(doc) != required:
            raise ConfigError(
                "geometry: give either {bs, ue, ris[, normal]} or "
                "{psi_deg, theta_deg, d_sr_m, d_rd_m}"
            )
        return LinkGeometry(
            psi_rad=math.radians(float(doc["psi_deg"])),
            theta_rad=math.radians(float(doc["theta_deg"])),
            d_sr_m=float(doc["d_sr_m"]),
            d_rd_m=float(doc["d_rd_m"]),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"geometry: {exc}") from exc


def _float_list(doc, path: str, allow_empty: bool = False) -> Tuple[float, ...]:
    if doc is None:
        doc = []
    if not isinstance(doc, (list, tuple)):
        raise ConfigError(f"{path}: expected a list of numbers")
    try:
        values = tuple(float(v) for v in doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not allow_empty and not values:
        raise ConfigError(f"{path}: must be nonempty")
    return values


def parse_config(doc: dict, command: str = "solve") -> RunConfig:
    """Validate a JSON config document into a :class:`RunConfig`.

    ``command`` decides which sections are mandatory: solve and sweep
    need rate targets (and an axis for sweeps); validate only needs its
    validation matrix and Monte Carlo settings.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object")
    doc = copy.deepcopy(doc)
    params = _parse_params(doc.get("params"))
    geom = _parse_geometry(doc.get("geometry"), params)
    needs_targets = command in ("solve", "sweep")

    schemes_doc = doc.get("schemes", [ES, TS])
    if not isinstance(schemes_doc, (list, tuple)) or not schemes_doc:
        raise ConfigError("schemes: must be a nonempty list")
    schemes = []
    for s in schemes_doc:
        if s not in (ES, TS):
            raise ConfigError(f"schemes: unknown scheme {s!r} (expected ES or TS)")
        if s not in schemes:
            schemes.append(s)

    condition = doc.get("condition", LOS)
    if condition not in (LOS, NLOS):
        raise ConfigError(f"condition: unknown condition {condition!r}")

    targets = doc.get("targets", {})
    if not isinstance(targets, dict):
        raise ConfigError("targets: expected an object")
    rates = _float_list(targets.get("rate_bps"), "targets.rate_bps",
                        allow_empty=not needs_targets)
    epsilons = _float_list(targets.get("epsilon"), "targets.epsilon", allow_empty=True)
    powers = _float_list(targets.get("tx_power_w"), "targets.tx_power_w", allow_empty=True)
    if needs_targets and condition == NLOS and not epsilons:
        raise ConfigError("targets.epsilon: required for NLOS solves")

    sweep_axis = doc.get("sweep_axis")
    if sweep_axis is not None and sweep_axis not in AXES:
        raise ConfigError(f"sweep_axis: unknown axis {sweep_axis!r} (expected one of {AXES})")
    if command == "sweep":
        if sweep_axis is None:
            raise ConfigError("sweep_axis: required for sweeps")
        axis_values = {"power": powers, "rate": rates, "outage_margin": epsilons}[sweep_axis]
        if not axis_values:
            raise ConfigError(f"targets: no values provided for sweep axis {sweep_axis!r}")
        if any(b <= a for a, b in zip(axis_values, axis_values[1:])):
            raise ConfigError(f"targets: {sweep_axis} sweep values must be strictly increasing")
        for name, values in (("rate_bps", rates), ("epsilon", epsilons), ("tx_power_w", powers)):
            axis_name = {"rate_bps": "rate", "epsilon": "outage_margin", "tx_power_w": "power"}[name]
            if axis_name != sweep_axis and len(values) > 1:
                raise ConfigError(f"targets.{name}: must hold a single value off the sweep axis")

    mc_doc = dict(doc.get("mc") or {})
    with_ks = bool(mc_doc.pop("ks", False))
    try:
        mc = McConfig(**{k: int(v) for k, v in mc_doc.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"mc: {exc}") from exc

    validate_doc = dict(doc.get("validate") or {})
    validate_m = validate_doc.pop("m_elements", [10, 32, 100])
    validate_points = validate_doc.pop("outage_points", [0.01, 0.1, 0.5])
    if validate_doc:
        raise ConfigError(f"validate: unknown fields {sorted(validate_doc)}")
    try:
        validate_m = tuple(int(m) for m in validate_m)
        validate_points = tuple(float(p) for p in validate_points)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"validate: {exc}") from exc
    if not validate_m or not validate_points:
        raise ConfigError("validate: m_elements and outage_points must be nonempty")
    if any(m < 1 for m in validate_m):
        raise ConfigError("validate.m_elements: element counts must be >= 1")
    if any(not 0.0 < p < 1.0 for p in validate_points):
        raise ConfigError("validate.outage_points: targets must lie inside (0, 1)")

    return RunConfig(
        params=params,
        geom=geom,
        schemes=tuple(schemes),
        condition=condition,
        rates=rates,
        epsilons=epsilons,
        powers=powers,
        sweep_axis=sweep_axis,
        output_path=doc.get("output_path"),
        mc=mc,
        validate_m=validate_m,
        validate_points=validate_points,
        with_ks=with_ks,
    )


def _result_row(axis: float, res: FeasibilityResult) -> str:
    d = res.diagnostics
    fields = (
        _fmt(axis),
        res.scheme,
        res.condition,
        _fmt(res.m_reflect),
        _fmt(res.m_harvest),
        _fmt(res.m_total),
        _fmt(res.m_total_int),
        _fmt(res.tau),
        _fmt(d.rate_slack),
        _fmt(d.ss_slack),
        _fmt(d.outage_slack),
        "",
    )
    return ",".join(fields)


def _error_row(axis: float, scheme: str, condition: str, exc: Exception) -> str:
    message = str(exc).replace(",", ";").replace("\n", " ")
    return ",".join(
        (_fmt(axis), scheme, condition, "", "", "", "", "", "", "", "", message)
    )


def cmd_solve(cfg: RunConfig) -> Tuple[List[str], int]:
    """One row per (rate, outage margin, scheme). Returns (rows, n_errors)."""
    rows = []
    errors = 0
    epsilons: Sequence[Optional[float]] = cfg.epsilons if cfg.condition == NLOS else (None,)
    for rate in cfg.rates:
        for eps in epsilons:
            for scheme in cfg.schemes:
                try:
                    res = solver.solve(cfg.params, cfg.geom, scheme, cfg.condition, rate, eps)
                    rows.append(_result_row(rate, res))
                except Exception as exc:
                    errors += 1
                    rows.append(_error_row(rate, scheme, cfg.condition, exc))
    return rows, errors


def cmd_sweep(cfg: RunConfig) -> Tuple[List[str], int]:
    """Sweep rows in axis order; per-point failures land in the error column."""
    if cfg.sweep_axis is None:
        raise ConfigError("sweep_axis: required for sweeps")
    rows = []
    errors = 0
    rate = cfg.rates[0]
    eps = cfg.epsilons[0] if cfg.epsilons else None
    axis_values = {
        "power": cfg.powers,
        "rate": cfg.rates,
        "outage_margin": cfg.epsilons,
    }[cfg.sweep_axis]
    for value in axis_values:
        params = cfg.params
        point_rate, point_eps = rate, eps
        if cfg.sweep_axis == "power":
            params = replace(cfg.params, tx_power_w=value)
        elif cfg.sweep_axis == "rate":
            point_rate = value
        else:
            point_eps = value
        for scheme in cfg.schemes:
            try:
                res = solver.solve(
                    params, cfg.geom, scheme, cfg.condition, point_rate, point_eps
                )
                rows.append(_result_row(value, res))
            except Exception as exc:
                errors += 1
                rows.append(_error_row(value, scheme, cfg.condition, exc))
    return rows, errors


def cmd_validate(cfg: RunConfig) -> Tuple[List[str], int]:
    """Monte Carlo vs analytic outage over the validation matrix."""
    rows = []
    consts = derive_constants(cfg.params, cfg.geom)
    for m in cfg.validate_m:
        model = outage_model(m)
        gammas = [
            gamma_for_outage(p, model, consts.gamma0, cfg.params.num_bs_antennas)
            for p in cfg.validate_points
        ]
        reports = empirical_outage_curve(
            cfg.params, cfg.geom, m, gammas, cfg.mc, with_ks=cfg.with_ks
        )
        for target, rep in zip(cfg.validate_points, reports):
            rows.append(
                ",".join(
                    (
                        _fmt(rep.m_elements),
                        _fmt(rep.gamma),
                        _fmt(target),
                        _fmt(rep.empirical_outage),
                        _fmt(rep.analytic_outage),
                        _fmt(rep.abs_gap),
                        _fmt(rep.binomial_stderr),
                        _fmt(rep.ks_distance),
                    )
                )
            )
    return rows, 0


def _log_grid(lo: float, hi: float, count: int) -> List[float]:
    return [float(v) for v in np.logspace(math.log10(lo), math.log10(hi), count)]


def _linear_grid(lo: float, hi: float, count: int) -> List[float]:
    return [float(v) for v in np.linspace(lo, hi, count)]


def presets() -> dict:
    """Built-in sweep/validation setups at the reference parameters."""
    return {
        # Element requirement vs transmit power, LOS, R0 = 10 Mbps.
        "fig2a": {
            "schemes": [ES, TS],
            "condition": LOS,
            "targets": {"rate_bps": [10e6], "tx_power_w": _log_grid(0.01, 1.0, 25)},
            "sweep_axis": "power",
        },
        # Element requirement vs rate target, LOS, P = 0.1 W.
        "fig2b": {
            "schemes": [ES, TS],
            "condition": LOS,
            "targets": {"rate_bps": _linear_grid(5e6, 50e6, 10)},
            "sweep_axis": "rate",
        },
        # Element requirement vs outage margin, NLOS, P = 0.1 W, R0 = 20 Mbps.
        "fig3a": {
            "schemes": [ES, TS],
            "condition": NLOS,
            "targets": {"rate_bps": [20e6], "epsilon": _log_grid(1e-4, 1e-1, 13)},
            "sweep_axis": "outage_margin",
        },
        # Same sweep at R0 = 15 Mbps.
        "fig3b": {
            "schemes": [ES, TS],
            "condition": NLOS,
            "targets": {"rate_bps": [15e6], "epsilon": _log_grid(1e-4, 1e-1, 13)},
            "sweep_axis": "outage_margin",
        },
        # Monte Carlo validation matrix for the outage approximation.
        "clt": {
            "validate": {"m_elements": [10, 32, 100], "outage_points": [0.01, 0.1, 0.5]},
        },
    }


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _load_config(args) -> dict:
    doc: dict = {}
    if args.preset:
        catalog = presets()
        if args.preset not in catalog:
            raise ConfigError(
                f"preset: unknown preset {args.preset!r} (available: {sorted(catalog)})"
            )
        doc = catalog[args.preset]
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON in {args.config}: {exc}") from exc
        doc = _merge(doc, user)
    if args.seed is not None:
        doc = _merge(doc, {"mc": {"seed": args.seed}})
    if args.out is not None:
        doc["output_path"] = args.out
    return doc


def _emit(header: str, rows: List[str], path: Optional[str]) -> None:
    text = header + "\n" + "".join(row + "\n" for row in rows)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssris",
        description=(
            "Minimum element counts for a self-sustainable reflecting surface "
            "under element-splitting and time-splitting operation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "solve single operating points"),
        ("sweep", "sweep an axis (power, rate, or outage_margin)"),
        ("validate", "Monte Carlo validation of the analytic outage"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="JSON config document")
        p.add_argument("--preset", metavar="NAME", help="built-in preset name")
        p.add_argument("--out", metavar="PATH", help="output CSV path (default stdout)")
        p.add_argument("--seed", type=int, metavar="U64", help="Monte Carlo seed override")
        p.add_argument(
            "--strict",
            action="store_true",
            help="exit 2 when any sweep/solve point fails",
        )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = _load_config(args)
        cfg = parse_config(doc, command=args.command)
        if args.command == "solve":
            rows, errors = cmd_solve(cfg)
            _emit(SOLVE_HEADER, rows, cfg.output_path)
        elif args.command == "sweep":
            rows, errors = cmd_sweep(cfg)
            _emit(SOLVE_HEADER, rows, cfg.output_path)
        else:
            rows, errors = cmd_validate(cfg)
            _emit(VALIDATE_HEADER, rows, cfg.output_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if errors and args.strict:
        print(f"error: {errors} point(s) failed (strict mode)", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
