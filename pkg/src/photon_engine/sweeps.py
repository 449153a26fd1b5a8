"""Experiment drivers: pump-strength sweeps, phase diagrams and current
scans, persisted as CSV with a JSON run manifest alongside.

All outputs are deterministic for a given configuration and grid: points are
solved independently (optionally in parallel, capped by the
PHOTON_ENGINE_WORKERS environment variable) and written in grid order.
Per-point solver failures are recorded in the row's convergence flag and the
run continues.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ScenarioConfig, config_hash
from .kinetics import SteadyStateError, model_at_t_hot, solve_steady_state
from .thermo import currents_dye_pumped, currents_external
from .thresholds import (continuum_threshold, mean_hot_energy,
                         numeric_threshold, reversible_dye_threshold,
                         two_level_threshold)

_FLOAT_FMT = ".17g"


def worker_count() -> int:
    raw = os.environ.get("PHOTON_ENGINE_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SweepSpec:
    """Grid over a swept parameter (currently the pump temperature T_h, K)."""

    start: float
    stop: float
    count: int
    log: bool = False
    parameter: str = "t_hot"

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError(f"sweep.count must be >= 2, got {self.count}")
        if not self.stop > self.start:
            raise ConfigError("sweep endpoints must be ordered (stop > start)")
        if self.log and self.start <= 0:
            raise ConfigError("log grids need start > 0")
        if self.parameter != "t_hot":
            raise ConfigError(f"unsupported sweep parameter {self.parameter!r}")

    def grid(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass
class RunManifest:
    config_hash: str
    code_version: str
    timestamp: str
    scenario: str
    points: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.__dict__, indent=2, sort_keys=True))


def _manifest_for(config: ScenarioConfig) -> RunManifest:
    return RunManifest(
        config_hash=config_hash(config), code_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
        scenario=config.pump.kind,
    )


def _manifest_path(out_path: Path) -> Path:
    return out_path.with_suffix(".manifest.json")


def _solve_point(args):
    config, t_hot = args
    try:
        steady = solve_steady_state(model_at_t_hot(config, t_hot), config.solver)
        return steady, None
    except (SteadyStateError, ValueError) as exc:
        return None, str(exc)


def _map_points(config: ScenarioConfig, grid: np.ndarray):
    jobs = [(config, float(t)) for t in grid]
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_solve_point, jobs))
    return [_solve_point(job) for job in jobs]


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return format(value, _FLOAT_FMT)


def _analytic_thresholds(config: ScenarioConfig) -> dict:
    ladder = config.ladder
    dye = config.dye
    out: dict = {}
    if config.pump.kind == "dye":
        out["reversible_dye"] = reversible_dye_threshold(
            ladder.omega0, dye.omega_d, dye.t_cold)
    elif config.pump.two_level is not None:
        omega_s, _ = config.pump.two_level
        out["two_level"] = two_level_threshold(ladder.omega0, omega_s, dye.t_cold)
    else:
        cont = continuum_threshold(ladder, dye.t_cold, units=config.units)
        out["continuum"] = cont.t_hot_critical
        out["n_th"] = cont.aux["n_th"]
    return out


def run_pump_sweep(config: ScenarioConfig, spec: SweepSpec,
                   out_path: str | Path) -> RunManifest:
    """Occupation vs pump temperature (occupation curves with threshold markers).

    CSV columns: index, t_hot_K, n0, n_photon, f0, p_e, mu_fit, t_fit,
    converged.  Analytic threshold markers land in the manifest sidecar.
    """
    out_path = Path(out_path)
    grid = spec.grid()
    results = _map_points(config, grid)
    manifest = _manifest_for(config)
    manifest.thresholds = _analytic_thresholds(config)

    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "t_hot_K", "n0", "n_photon", "f0", "p_e",
                         "mu_fit", "t_fit", "converged"])
        for i, (t_hot, (steady, error)) in enumerate(zip(grid, results)):
            if steady is None:
                writer.writerow([i, _fmt(t_hot)] + ["nan"] * 6 + [0])
                manifest.points.append({"index": i, "t_hot": t_hot,
                                        "converged": False, "error": error})
                continue
            writer.writerow([
                i, _fmt(t_hot), _fmt(float(steady.n[0])), _fmt(steady.n_photon),
                _fmt(steady.condensate_fraction), _fmt(steady.p_e),
                _fmt(steady.mu_fit), _fmt(steady.t_fit),
                int(steady.converged),
            ])
            manifest.points.append({"index": i, "t_hot": t_hot,
                                    "converged": bool(steady.converged)})
    manifest.write(_manifest_path(out_path))
    return manifest


def run_phase_diagram(config: ScenarioConfig, t_cold_grid,
                      out_path: str | Path,
                      numeric_span: tuple[float, float] = (0.5, 2.0),
                      numeric_points: int = 9) -> RunManifest:
    """Threshold T_h vs T_c for many-level external pumping (threshold curves vs solvent temperature).

    CSV columns: t_cold_K, t_h_continuum_K, t_h_two_level_K, t_h_numeric_K,
    converged.  The two-level column evaluates the reversible threshold at
    the hot reservoir's mean energy per particle.
    """
    if config.pump.kind != "external" or config.pump.two_level is not None:
        raise ConfigError("phase diagram needs a many-level external config")
    out_path = Path(out_path)
    manifest = _manifest_for(config)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_cold_K", "t_h_continuum_K", "t_h_two_level_K",
                         "t_h_numeric_K", "converged"])
        for t_cold in np.atleast_1d(np.asarray(t_cold_grid, dtype=float)):
            point_config = replace(
                config, dye=replace(config.dye, t_cold=float(t_cold)))
            try:
                cont = continuum_threshold(config.ladder, float(t_cold),
                                           units=config.units)
                omega_bar = mean_hot_energy(config.ladder, cont.t_hot_critical,
                                            config.units)
                reversible = two_level_threshold(config.ladder.omega0,
                                                 omega_bar, float(t_cold))
                grid = np.geomspace(numeric_span[0] * cont.t_hot_critical,
                                    numeric_span[1] * cont.t_hot_critical,
                                    numeric_points)
                numeric = numeric_threshold(point_config, grid)
                writer.writerow([_fmt(float(t_cold)),
                                 _fmt(cont.t_hot_critical), _fmt(reversible),
                                 _fmt(numeric.t_hot_critical), 1])
                manifest.points.append({"t_cold": float(t_cold),
                                        "converged": True})
            except (SteadyStateError, ValueError) as exc:
                writer.writerow([_fmt(float(t_cold)), "nan", "nan", "nan", 0])
                manifest.points.append({"t_cold": float(t_cold),
                                        "converged": False, "error": str(exc)})
    manifest.write(_manifest_path(out_path))
    return manifest


def run_currents_scan(config: ScenarioConfig, spec: SweepSpec,
                      out_path: str | Path) -> RunManifest:
    """Heat currents, work, efficiency and entropy production over a pump
    temperature grid (engine characteristics).

    CSV columns: index, t_hot_K, j_hot, j_cold, work, l_incoherent, eta,
    eta_carnot, sigma, sigma_bath, converged.
    """
    out_path = Path(out_path)
    grid = spec.grid()
    results = _map_points(config, grid)
    manifest = _manifest_for(config)
    manifest.thresholds = _analytic_thresholds(config)

    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "t_hot_K", "j_hot", "j_cold", "work",
                         "l_incoherent", "eta", "eta_carnot", "sigma",
                         "sigma_bath", "converged"])
        for i, (t_hot, (steady, error)) in enumerate(zip(grid, results)):
            if steady is None:
                writer.writerow([i, _fmt(t_hot)] + ["nan"] * 8 + [0])
                manifest.points.append({"index": i, "t_hot": float(t_hot),
                                        "converged": False, "error": error})
                continue
            model = model_at_t_hot(config, float(t_hot))
            if config.pump.kind == "dye":
                report = currents_dye_pumped(steady, model, config.units)
            else:
                report = currents_external(steady, model, config.units)
            writer.writerow([
                i, _fmt(t_hot), _fmt(report.j_hot), _fmt(report.j_cold),
                _fmt(report.work), _fmt(report.l_incoherent), _fmt(report.eta),
                _fmt(report.eta_carnot), _fmt(report.sigma),
                _fmt(report.sigma_bath), int(steady.converged),
            ])
            manifest.points.append({"index": i, "t_hot": float(t_hot),
                                    "converged": bool(steady.converged)})
    manifest.write(_manifest_path(out_path))
    return manifest


def all_points_converged(manifest: RunManifest) -> bool:
    return all(p.get("converged") for p in manifest.points)
