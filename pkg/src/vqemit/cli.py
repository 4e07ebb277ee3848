"""Command-line front end: config parsing, scenario presets, CSV emission.

Exit codes: 0 success, 2 config error, 3 data error, 4 numerical guard.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import mitigation
from .chem import exact_ground_energy, hamiltonian, load_coefficients
from .errors import ConfigError, DataError, NumericalGuardError
from .noise import NOISELESS, NoiseModel
from .vqe import (
    FAMILIES,
    SWEEP_VARIANTS,
    ScanConfig,
    gate_error_sweep,
    response_matrix_for,
    run_scan,
)

ENERGY_HEADER = (
    "family,scenario,r_angstrom,theta_star,e_raw_ha,e_mitigated_ha,"
    "e_exact_ha,retention_ratio,shots,seed"
)
SWEEP_HEADER = "gate_error_rate,variant,abs_energy_error_ha"


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(f) for f in text.split(",") if f.strip())


def _parse_names(text: str) -> tuple[str, ...]:
    return tuple(f.strip() for f in text.split(",") if f.strip())


# section -> key -> (parser, default)
_SCHEMA = {
    "chem": {"coefficients_path": (str, "bundled")},
    "scan": {"theta_points": (int, 257), "r_list": (str, "all")},
    "noise": {
        "depolarizing_1q": (float, 0.0),
        "depolarizing_2q": (float, 0.0),
        "readout_p01": (float, 0.0),
        "readout_p10": (float, 0.0),
    },
    "run": {
        "family": (str, "bare"),
        "mode": (str, "exact"),
        "shots": (int, 8192),
        "seed": (int, 2022),
        "measure_yy": (_parse_bool, False),
        "b_decomposed": (_parse_bool, False),
    },
    "mitigation": {
        "brem": (_parse_bool, False),
        "brem_max_iters": (int, 100),
        "brem_tol": (float, 1e-6),
        "ideal_b": (_parse_bool, False),
    },
    "sweep": {
        "rates": (_parse_floats, tuple(round(0.01 * k, 2) for k in range(13))),
        "r": (float, 0.75),
        "variants": (_parse_names, SWEEP_VARIANTS),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict

    def __getitem__(self, key: tuple[str, str]):
        return self.values[key]


def parse_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key {section}.{key}")
            fn, _ = _SCHEMA[section][key]
            try:
                values[(section, key)] = fn(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc
    for section, keys in _SCHEMA.items():
        for key, (_, default) in keys.items():
            values.setdefault((section, key), default)
    return ExperimentConfig(values)


def default_config() -> ExperimentConfig:
    values = {
        (section, key): default
        for section, keys in _SCHEMA.items()
        for key, (_, default) in keys.items()
    }
    return ExperimentConfig(values)


@dataclass(frozen=True)
class RunJob:
    family: str
    scenario: str
    noise: NoiseModel


def _scenario_label(noise: NoiseModel) -> str:
    parts = []
    if noise.p1 > 0.0 or noise.p2 > 0.0:
        parts.append(f"dep-{noise.p1 * 100:g}pct")
    if noise.has_readout_error:
        parts.append(f"ro-{noise.readout_p01 * 100:g}pct")
    return "+".join(parts) if parts else "noiseless"


_RUN_FAMILIES = ("bare", "encoded", "duplicate")


def _readout_preset(rate: float) -> dict:
    nm = NoiseModel(readout_p01=rate, readout_p10=rate)
    return {
        "jobs": [RunJob(f, _scenario_label(nm), nm) for f in _RUN_FAMILIES],
        "overrides": {("run", "mode"): "shots", ("mitigation", "brem"): True},
    }


def _depolarizing_preset(rate: float) -> dict:
    nm = NoiseModel(p1=rate, p2=rate)
    return {
        "jobs": [RunJob(f, _scenario_label(nm), nm) for f in _RUN_FAMILIES],
        "overrides": {("run", "mode"): "shots", ("mitigation", "brem"): True},
    }


def _mixed_preset(readout: float) -> dict:
    jobs = []
    for dep in (0.004, 0.012, 0.02):
        nm = NoiseModel(p1=dep, p2=dep, readout_p01=readout, readout_p10=readout)
        jobs.extend(RunJob(f, _scenario_label(nm), nm) for f in _RUN_FAMILIES)
    return {
        "jobs": jobs,
        "overrides": {("run", "mode"): "shots", ("mitigation", "brem"): True},
    }


RUN_PRESETS = {
    "exact-baseline": lambda: {
        "jobs": [RunJob(f, "noiseless", NOISELESS) for f in _RUN_FAMILIES],
        "overrides": {("run", "mode"): "exact", ("mitigation", "brem"): False},
    },
    "readout-only-0.5pct": lambda: _readout_preset(0.005),
    "readout-only-2pct": lambda: _readout_preset(0.02),
    "readout-only-4pct": lambda: _readout_preset(0.04),
    "depolarizing-only-0.1pct": lambda: _depolarizing_preset(0.001),
    "depolarizing-only-0.5pct": lambda: _depolarizing_preset(0.005),
    "depolarizing-only-1pct": lambda: _depolarizing_preset(0.01),
    "depolarizing-only-2pct": lambda: _depolarizing_preset(0.02),
    "mixed-1pct-readout": lambda: _mixed_preset(0.01),
    "mixed-2pct-readout": lambda: _mixed_preset(0.02),
    "mixed-3pct-readout": lambda: _mixed_preset(0.03),
}

SWEEP_PRESETS = {
    "gate-error-sweep": {
        ("sweep", "rates"): tuple(round(0.01 * k, 2) for k in range(13)),
        ("sweep", "r"): 0.75,
        ("sweep", "variants"): SWEEP_VARIANTS,
    },
    "gate-error-crossover": {
        ("sweep", "rates"): (0.20, 0.25, 0.30, 0.35, 0.40),
        ("sweep", "r"): 0.75,
        ("sweep", "variants"): ("bare", "encoded", "duplicate"),
    },
}


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _load_table(cfg: ExperimentConfig):
    return load_coefficients(cfg[("chem", "coefficients_path")])


def _r_values(cfg: ExperimentConfig, table) -> tuple[float, ...] | None:
    raw = cfg[("scan", "r_list")]
    if raw.strip() == "all":
        return None
    values = _parse_floats(raw)
    for r in values:
        table.coefficients(r)  # raises DataError with nearest rows
    return values


def _resolve_config(args) -> ExperimentConfig:
    if getattr(args, "config", None) and getattr(args, "preset", None):
        raise ConfigError("pass either --config or --preset, not both")
    cfg = parse_config(args.config) if getattr(args, "config", None) else default_config()
    return cfg


def _apply_overrides(cfg: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    values = dict(cfg.values)
    values.update(overrides)
    return ExperimentConfig(values)


def _scan_config(cfg: ExperimentConfig, job: RunJob, table, args) -> ScanConfig:
    mode = cfg[("run", "mode")]
    if mode not in ("exact", "shots"):
        raise ConfigError(f"run.mode must be exact or shots, got {mode!r}")
    seed = args.seed if args.seed is not None else cfg[("run", "seed")]
    return ScanConfig(
        family=job.family,
        noise=job.noise,
        theta_points=cfg[("scan", "theta_points")],
        r_values=_r_values(cfg, table),
        shots=None if mode == "exact" else cfg[("run", "shots")],
        seed=seed,
        brem=cfg[("mitigation", "brem")],
        brem_max_iters=cfg[("mitigation", "brem_max_iters")],
        brem_tol=cfg[("mitigation", "brem_tol")],
        ideal_b=cfg[("mitigation", "ideal_b")],
        b_decomposed=cfg[("run", "b_decomposed")],
        measure_yy=cfg[("run", "measure_yy")],
        jobs=args.jobs,
    )


def cmd_run_vqe(args) -> int:
    cfg = _resolve_config(args)
    if args.preset:
        if args.preset not in RUN_PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; choose from {sorted(RUN_PRESETS)}"
            )
        plan = RUN_PRESETS[args.preset]()
        cfg = _apply_overrides(cfg, plan["overrides"])
        jobs = plan["jobs"]
    else:
        family = cfg[("run", "family")]
        if family not in FAMILIES:
            raise ConfigError(f"run.family must be one of {FAMILIES}, got {family!r}")
        nm = NoiseModel(
            p1=cfg[("noise", "depolarizing_1q")],
            p2=cfg[("noise", "depolarizing_2q")],
            readout_p01=cfg[("noise", "readout_p01")],
            readout_p10=cfg[("noise", "readout_p10")],
        )
        jobs = [RunJob(family, _scenario_label(nm), nm)]

    table = _load_table(cfg)
    rows = []
    for job in jobs:
        scan_cfg = _scan_config(cfg, job, table, args)
        for rec in run_scan(scan_cfg, table):
            rows.append(
                (
                    job.family,
                    job.scenario,
                    rec.r,
                    rec.theta_star,
                    rec.e_raw,
                    rec.e_mitigated,
                    rec.e_exact,
                    rec.retention_ratio if job.family == "encoded" else None,
                    scan_cfg.shots,
                    scan_cfg.seed if scan_cfg.shots is not None else None,
                )
            )
    rows.sort(key=lambda row: (row[0], row[1], row[2]))
    with open(args.out, "w") as fh:
        fh.write(ENERGY_HEADER + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return 0


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    if args.preset:
        if args.preset not in SWEEP_PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; choose from {sorted(SWEEP_PRESETS)}"
            )
        cfg = _apply_overrides(cfg, SWEEP_PRESETS[args.preset])
    table = _load_table(cfg)
    rows = gate_error_sweep(
        list(cfg[("sweep", "rates")]),
        cfg[("sweep", "r")],
        tuple(cfg[("sweep", "variants")]),
        table,
        cfg[("scan", "theta_points")],
        cfg[("run", "b_decomposed")],
    )
    rows.sort(key=lambda row: (row[0], row[1]))
    with open(args.out, "w") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for rate, variant, err in rows:
            fh.write(f"{fmt(rate)},{variant},{fmt(err)}\n")
    return 0


def cmd_unfold(args) -> int:
    hist = mitigation.read_histogram_csv(args.histogram)
    response = mitigation.read_response_csv(args.response)
    measured = hist.frequencies()
    if len(measured) != response.shape[0]:
        raise DataError(
            f"histogram has {len(measured)} outcomes but response is "
            f"{response.shape[0]}x{response.shape[0]}"
        )
    cfg = _resolve_config(args)
    unfolded = mitigation.brem_unfold(
        measured,
        response,
        cfg[("mitigation", "brem_max_iters")],
        cfg[("mitigation", "brem_tol")],
    )
    n_bits = hist.n_bits
    with open(args.out, "w") as fh:
        fh.write("bitstring,probability\n")
        for idx, prob in enumerate(unfolded):
            fh.write(f"{idx:0{n_bits}b},{fmt(float(prob))}\n")
    return 0


def cmd_exact_curve(args) -> int:
    cfg = _resolve_config(args)
    table = _load_table(cfg)
    with open(args.out, "w") as fh:
        fh.write("r_angstrom,e_exact_ha\n")
        for r in table.bond_lengths:
            fh.write(f"{fmt(r)},{fmt(exact_ground_energy(hamiltonian(table, r)))}\n")
    return 0


def cmd_calibrate(args) -> int:
    cfg = _resolve_config(args)
    family = cfg[("run", "family")]
    if family not in FAMILIES:
        raise ConfigError(f"run.family must be one of {FAMILIES}, got {family!r}")
    base = "duplicate" if family.startswith("duplicate") else family
    nm = NoiseModel(
        p1=cfg[("noise", "depolarizing_1q")],
        p2=cfg[("noise", "depolarizing_2q")],
        readout_p01=cfg[("noise", "readout_p01")],
        readout_p10=cfg[("noise", "readout_p10")],
    )
    mode = cfg[("run", "mode")]
    seed = args.seed if args.seed is not None else cfg[("run", "seed")]
    response = response_matrix_for(
        base,
        nm,
        None if mode == "exact" else cfg[("run", "shots")],
        seed,
        cfg[("run", "shots")],
    )
    mitigation.write_response_csv(args.out, response)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqemit",
        description="Noisy VQE simulations of H2 with three error-mitigation schemes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, preset_help):
        p.add_argument("--config", help="experiment config file (INI format)")
        p.add_argument("--preset", help=preset_help)
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p = sub.add_parser("run-vqe", help="theta-grid energy scan over bond lengths")
    common(p, f"one of {sorted(RUN_PRESETS)}")
    p.set_defaults(fn=cmd_run_vqe)

    p = sub.add_parser("sweep", help="gate-error sweep at one bond length")
    common(p, f"one of {sorted(SWEEP_PRESETS)}")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("unfold", help="Bayesian-unfold a histogram file")
    p.add_argument("--histogram", required=True, help="CSV with bitstring,count rows")
    p.add_argument("--response", required=True, help="response-matrix CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="optional config for unfolding parameters")
    p.add_argument("--preset", help=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--jobs", type=int, default=1, help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_unfold)

    p = sub.add_parser("exact-curve", help="exact ground energies for every row")
    common(p, argparse.SUPPRESS)
    p.set_defaults(fn=cmd_exact_curve)

    p = sub.add_parser("calibrate", help="emit a readout response matrix")
    common(p, argparse.SUPPRESS)
    p.set_defaults(fn=cmd_calibrate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
