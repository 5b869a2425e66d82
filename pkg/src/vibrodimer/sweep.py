"""Parameter-grid execution: config parsing, parallel solves, CSV output.

The config file is INI-style (section headers, flat ``key = value``
pairs); unknown sections or keys are rejected.  An empty file yields the
full default configuration (the PE545-like preset).  Grid axes accept
``start:stop:step`` (inclusive), ``log:lo:hi:n``, or comma lists;
``lambda_pairs`` is a semicolon-separated list of ``lambda_e,lambda_v``
pairs.

Every grid point is solved independently; identical configs produce
bit-identical CSVs (fixed row order, shortest round-trip float
formatting, single-threaded BLAS inside every solve regardless of the
worker count).  Failures are recorded per row with the error class,
never dropped.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .dissipators import DecayParams
from .dynamics import PropagationSpec, TimeSeries, propagate
from .model import DimerConfig, SiteParams
from .ness import NessResult, build_generator_bundle, characterize_ness
from .units import CONSTANTS

SCHEMA_VERSION = "1"

DEFAULT_OMEGA = tuple(float(x) for x in np.arange(400.0, 1601.0, 20.0))
DEFAULT_HUANG_RHYS = tuple(float(x) for x in np.geomspace(1e-3, 0.2, 20))
DEFAULT_LAMBDA_PAIRS = ((1.0, 1.0), (10.0, 1.0), (100.0, 1.0), (100.0, 10.0))


class ConfigError(Exception):
    """Invalid configuration; carries the full list of problems."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class SweepConfig:
    # dimer
    epsilon_acceptor: float = 18532.0
    epsilon_donor: float = 19574.0
    coupling: float = 92.0
    dipole_acceptor: float = 12.17
    dipole_donor: float = 11.87
    n_vib: int = 3
    # baths
    gamma_cutoff: float = 100.0
    temperature_phonon: float = 300.0
    temperature_radiation: float = 5600.0
    light_couples_acceptor: bool = False
    # decay
    tau_rec_ns: float = 1.0
    tau_trap_ps: float = 10.0
    # channel toggles
    light: bool = True
    phonon: bool = True
    recombination: bool = True
    trapping: bool = True
    absorption: bool = True
    emission: bool = True
    # grid axes
    omega_grid: tuple = DEFAULT_OMEGA
    huang_rhys_grid: tuple = DEFAULT_HUANG_RHYS
    lambda_pairs: tuple = DEFAULT_LAMBDA_PAIRS
    # dynamics mode
    dynamics_omega: tuple = (700.0, 1058.0, 1400.0)
    dynamics_coupling_g: float = 250.0   # <= 0 means: use dynamics_huang_rhys
    dynamics_huang_rhys: float = 0.0578
    dynamics_lambda: tuple = (10.0, 1.0)
    dynamics_tau_trap_ps: float = 1.0
    t_stop_fs: float = 1000.0
    dt_out_fs: float = 1.0
    initial: str = "donor"
    # run
    workers: int = 1


_SECTIONS = {
    "dimer": {
        "epsilon_acceptor": float, "epsilon_donor": float, "coupling": float,
        "dipole_acceptor": float, "dipole_donor": float, "n_vib": int,
    },
    "baths": {
        "gamma_cutoff": float, "temperature_phonon": float,
        "temperature_radiation": float, "light_couples_acceptor": bool,
    },
    "decay": {"tau_rec_ns": float, "tau_trap_ps": float},
    "channels": {
        "light": bool, "phonon": bool, "recombination": bool,
        "trapping": bool, "absorption": bool, "emission": bool,
    },
    "grid": {"omega": "axis", "huang_rhys": "axis", "lambda_pairs": "pairs"},
    "dynamics": {
        "omega": "axis", "coupling_g": float, "huang_rhys": float,
        "lambda": "pair", "tau_trap_ps": float, "t_stop_fs": float,
        "dt_out_fs": float, "initial": str,
    },
    "run": {"workers": int},
}

# (section, key) -> SweepConfig field when the names differ
_FIELD_MAP = {
    ("grid", "omega"): "omega_grid",
    ("grid", "huang_rhys"): "huang_rhys_grid",
    ("grid", "lambda_pairs"): "lambda_pairs",
    ("dynamics", "omega"): "dynamics_omega",
    ("dynamics", "coupling_g"): "dynamics_coupling_g",
    ("dynamics", "huang_rhys"): "dynamics_huang_rhys",
    ("dynamics", "lambda"): "dynamics_lambda",
    ("dynamics", "tau_trap_ps"): "dynamics_tau_trap_ps",
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_axis(text: str) -> tuple:
    text = text.strip()
    if text.startswith("log:"):
        parts = text[4:].split(":")
        if len(parts) != 3:
            raise ValueError(f"log axis needs log:lo:hi:n, got {text!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        return tuple(float(x) for x in np.geomspace(lo, hi, n))
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range axis needs start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("axis step must be positive")
        return tuple(float(x) for x in np.arange(start, stop + 0.5 * step, step))
    return tuple(float(p) for p in text.split(",") if p.strip())


def _parse_pair(text: str) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise ValueError(f"expected a pair a,b, got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _parse_pairs(text: str) -> tuple:
    return tuple(_parse_pair(group) for group in text.split(";") if group.strip())


def validate_config(cfg: SweepConfig) -> list[str]:
    """All semantic violations, named by field."""
    bad = []
    pos = ["epsilon_acceptor", "epsilon_donor", "gamma_cutoff",
           "temperature_phonon", "temperature_radiation", "tau_rec_ns",
           "tau_trap_ps", "dynamics_tau_trap_ps", "dt_out_fs"]
    for name in pos:
        if not getattr(cfg, name) > 0:
            bad.append(f"{name} must be positive")
    for name in ("dipole_acceptor", "dipole_donor", "dynamics_huang_rhys"):
        if getattr(cfg, name) < 0:
            bad.append(f"{name} must be non-negative")
    if cfg.epsilon_donor <= cfg.epsilon_acceptor:
        bad.append("epsilon_donor must exceed epsilon_acceptor")
    if cfg.n_vib < 1:
        bad.append("n_vib must be at least 1")
    if cfg.workers < 1:
        bad.append("workers must be at least 1")
    if cfg.t_stop_fs < 0:
        bad.append("t_stop_fs must be non-negative")
    for axis in ("omega_grid", "huang_rhys_grid", "lambda_pairs", "dynamics_omega"):
        if len(getattr(cfg, axis)) == 0:
            bad.append(f"{axis} must not be empty")
    if any(om <= 0 for om in cfg.omega_grid):
        bad.append("omega_grid values must be positive")
    if any(s < 0 for s in cfg.huang_rhys_grid):
        bad.append("huang_rhys_grid values must be non-negative")
    if any(l < 0 for pair in cfg.lambda_pairs for l in pair):
        bad.append("lambda_pairs values must be non-negative")
    if cfg.initial not in ("donor", "acceptor", "ground"):
        bad.append("initial must be donor, acceptor, or ground")
    return bad


def parse_config(path) -> SweepConfig:
    """Read and fully validate a config file; defaults fill every gap."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"])
    except configparser.Error as exc:
        raise ConfigError([f"config syntax error: {exc}"])

    problems = []
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            problems.append(f"unknown section [{section}]")
            continue
        schema = _SECTIONS[section]
        for key, raw in parser.items(section):
            if key not in schema:
                problems.append(f"unknown key {key!r} in section [{section}]")
                continue
            kind = schema[key]
            target = _FIELD_MAP.get((section, key), key)
            try:
                if kind is bool:
                    values[target] = _parse_bool(raw)
                elif kind is int:
                    values[target] = int(raw)
                elif kind is float:
                    values[target] = float(raw)
                elif kind is str:
                    values[target] = raw.strip()
                elif kind == "axis":
                    values[target] = _parse_axis(raw)
                elif kind == "pair":
                    values[target] = _parse_pair(raw)
                elif kind == "pairs":
                    values[target] = _parse_pairs(raw)
            except ValueError as exc:
                problems.append(f"[{section}] {key}: {exc}")

    if problems:
        raise ConfigError(problems)
    cfg = SweepConfig(**values)
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def dimer_from_config(cfg: SweepConfig, omega: float, huang_rhys: float) -> DimerConfig:
    donor = SiteParams(
        epsilon=cfg.epsilon_donor, omega=omega, huang_rhys=huang_rhys,
        dipole=cfg.dipole_donor, couples_to_light=True)
    acceptor = SiteParams(
        epsilon=cfg.epsilon_acceptor, omega=omega, huang_rhys=huang_rhys,
        dipole=cfg.dipole_acceptor, couples_to_light=cfg.light_couples_acceptor)
    return DimerConfig(donor=donor, acceptor=acceptor, coupling_v=cfg.coupling,
                       n_vib=cfg.n_vib)


def bundle_for_point(cfg: SweepConfig, omega: float, huang_rhys: float,
                     lambda_e: float, lambda_v: float, *,
                     tau_trap_ps: float | None = None):
    dimer = dimer_from_config(cfg, omega, huang_rhys)
    decay = None
    if cfg.recombination or cfg.trapping:
        decay = DecayParams(
            tau_rec_ns=cfg.tau_rec_ns,
            tau_trap_ps=tau_trap_ps if tau_trap_ps is not None else cfg.tau_trap_ps,
            trap_enabled=cfg.trapping,
        )
    return build_generator_bundle(
        dimer,
        lambda_e=lambda_e,
        lambda_v=lambda_v,
        gamma_cut=cfg.gamma_cutoff,
        temperature_phonon=cfg.temperature_phonon,
        temperature_radiation=cfg.temperature_radiation,
        decay=decay,
        light=cfg.light,
        phonon=cfg.phonon,
        recombination=cfg.recombination,
        light_both_sites=cfg.light_couples_acceptor,
        absorption=cfg.absorption,
        emission=cfg.emission,
    )


RESULT_COLUMNS = (
    "lambda_e", "lambda_v", "huang_rhys", "omega",
    "eta", "J_abs", "J_emi", "J_rec", "J_trap",
    "pop_A", "pop_D", "pop_G", "im_coherence", "flux",
    "continuity_residual", "min_eig", "residual", "method", "status", "error",
)


@dataclass
class ResultRow:
    lambda_e: float
    lambda_v: float
    huang_rhys: float
    omega: float
    eta: float = math.nan
    J_abs: float = math.nan
    J_emi: float = math.nan
    J_rec: float = math.nan
    J_trap: float = math.nan
    pop_A: float = math.nan
    pop_D: float = math.nan
    pop_G: float = math.nan
    im_coherence: float = math.nan
    flux: float = math.nan
    continuity_residual: float = math.nan
    min_eig: float = math.nan
    residual: float = math.nan
    method: str = ""
    status: str = "ok"
    error: str = ""
    wall_time_s: float = 0.0   # diagnostics only; excluded from the CSV

    @classmethod
    def from_result(cls, point, res: NessResult, wall: float) -> "ResultRow":
        le, lv, s, om = point
        return cls(
            lambda_e=le, lambda_v=lv, huang_rhys=s, omega=om,
            eta=res.eta, J_abs=res.J_abs, J_emi=res.J_emi, J_rec=res.J_rec,
            J_trap=res.J_trap, pop_A=res.pop_A, pop_D=res.pop_D, pop_G=res.pop_G,
            im_coherence=res.im_coherence, flux=res.flux,
            continuity_residual=res.continuity_residual, min_eig=res.min_eig,
            residual=res.residual, method=res.method, wall_time_s=wall,
        )


def _solve_point(args) -> ResultRow:
    cfg_values, point = args
    cfg = SweepConfig(**cfg_values)
    le, lv, s, om = point
    start = time.perf_counter()
    try:
        with threadpool_limits(limits=1):
            bundle = bundle_for_point(cfg, om, s, le, lv)
            res = characterize_ness(bundle)
        return ResultRow.from_result(point, res, time.perf_counter() - start)
    except Exception as exc:  # recorded per row, never dropped
        return ResultRow(lambda_e=le, lambda_v=lv, huang_rhys=s, omega=om,
                         status=f"error:{type(exc).__name__}", error=str(exc),
                         wall_time_s=time.perf_counter() - start)


def solve_grid(cfg: SweepConfig, points: list[tuple]) -> list[ResultRow]:
    """Solve the given (lambda_e, lambda_v, S, omega) points in order."""
    payload = [(asdict(cfg), p) for p in points]
    if cfg.workers <= 1:
        return [_solve_point(item) for item in payload]
    chunk = max(1, len(payload) // (cfg.workers * 8))
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_solve_point, payload, chunksize=chunk))


def _format(value) -> str:
    if isinstance(value, float):
        # builtin-float repr: shortest string that round-trips
        return repr(float(value))
    return str(value)


def write_rows(path: Path, rows: list[ResultRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([_format(getattr(row, col)) for col in RESULT_COLUMNS])


def config_hash(cfg: SweepConfig) -> str:
    canon = json.dumps(asdict(cfg), sort_keys=True, default=list)
    return hashlib.sha256(canon.encode()).hexdigest()


def write_metadata(path: Path, cfg: SweepConfig, mode: str, extra: dict) -> None:
    record = {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "package_version": __version__,
        "config": asdict(cfg),
        "config_hash": config_hash(cfg),
        "constants": asdict(CONSTANTS),
    }
    record.update(extra)
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2, default=list)
        fh.write("\n")


def ness_points(cfg: SweepConfig) -> list[tuple]:
    return [
        (le, lv, s, om)
        for (le, lv) in cfg.lambda_pairs
        for s in cfg.huang_rhys_grid
        for om in cfg.omega_grid
    ]


def run_ness_sweep(cfg: SweepConfig, out_dir) -> dict:
    """One steady state per (lambda pair, S, omega) grid point."""
    problems = validate_config(cfg)
    if not cfg.light:
        problems.append("light must be enabled in ness mode (yield undefined otherwise)")
    if problems:
        raise ConfigError(problems)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    rows = solve_grid(cfg, ness_points(cfg))
    write_rows(out / "ness_sweep.csv", rows)
    n_failed = sum(r.status != "ok" for r in rows)
    write_metadata(out / "metadata.json", cfg, "ness", {
        "rows": len(rows), "failed": n_failed,
        "elapsed_s": time.perf_counter() - start,
        "outputs": ["ness_sweep.csv"],
    })
    return {"rows": len(rows), "failed": n_failed, "files": [out / "ness_sweep.csv"]}


DECOMPOSITION_VARIANTS = {
    # phonons off and trapping off in both; recombination distinguishes them
    "light_only": {"phonon": False, "recombination": False, "trapping": False},
    "light_rec": {"phonon": False, "recombination": True, "trapping": False},
}


def run_decomposition(cfg: SweepConfig, out_dir) -> dict:
    """The two bath-decomposition experiments on the (S, omega) grid."""
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    files, total_failed, total_rows = [], 0, 0
    for name, switches in DECOMPOSITION_VARIANTS.items():
        variant = replace(cfg, light=True, absorption=True, emission=True, **switches)
        points = [(0.0, 0.0, s, om)
                  for s in cfg.huang_rhys_grid for om in cfg.omega_grid]
        rows = solve_grid(variant, points)
        path = out / f"decomposition_{name}.csv"
        write_rows(path, rows)
        files.append(path)
        total_failed += sum(r.status != "ok" for r in rows)
        total_rows += len(rows)
    write_metadata(out / "metadata.json", cfg, "decompose", {
        "rows": total_rows, "failed": total_failed,
        "elapsed_s": time.perf_counter() - start,
        "outputs": [f.name for f in files],
    })
    return {"rows": total_rows, "failed": total_failed, "files": files}


TIMESERIES_COLUMNS = ("t_fs", "pop_A", "pop_D", "pop_G", "rc_population",
                      "im_coherence", "trace", "min_eig")


def write_timeseries(path: Path, ts: TimeSeries) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMESERIES_COLUMNS)
        for i in range(len(ts.times_fs)):
            writer.writerow([
                repr(float(ts.times_fs[i])), repr(float(ts.pop_A[i])),
                repr(float(ts.pop_D[i])), repr(float(ts.pop_G[i])),
                repr(float(ts.rc_population[i])), repr(float(ts.im_coherence[i])),
                repr(float(ts.trace[i])), repr(float(ts.min_eig[i])),
            ])


def run_dynamics(cfg: SweepConfig, out_dir) -> dict:
    """One time propagation per dynamics-mode vibrational frequency."""
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    lam_e, lam_v = cfg.dynamics_lambda
    files, failed = [], 0
    for om in cfg.dynamics_omega:
        if cfg.dynamics_coupling_g > 0:
            s = (cfg.dynamics_coupling_g / om) ** 2
        else:
            s = cfg.dynamics_huang_rhys
        path = out / f"dynamics_omega{int(round(om)):04d}.csv"
        try:
            with threadpool_limits(limits=1):
                bundle = bundle_for_point(cfg, om, s, lam_e, lam_v,
                                          tau_trap_ps=cfg.dynamics_tau_trap_ps)
                ts = propagate(bundle, PropagationSpec(
                    t_stop_fs=cfg.t_stop_fs, dt_out_fs=cfg.dt_out_fs,
                    initial=cfg.initial))
            write_timeseries(path, ts)
            files.append(path)
        except Exception as exc:
            failed += 1
            with open(out / f"dynamics_omega{int(round(om)):04d}.error", "w") as fh:
                fh.write(f"{type(exc).__name__}: {exc}\n")
    write_metadata(out / "metadata.json", cfg, "dynamics", {
        "rows": len(cfg.dynamics_omega), "failed": failed,
        "elapsed_s": time.perf_counter() - start,
        "outputs": [f.name for f in files],
    })
    return {"rows": len(cfg.dynamics_omega), "failed": failed, "files": files}
