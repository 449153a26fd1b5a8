"""Model types and configuration ingestion.

The canonical configuration grammar is TOML with sections [ladder], [dye],
[pump] and [solver] (see configs/ in the repository root for complete
examples).  JSON files with the same structure are accepted as well.
Tabulated absorption profiles are read from two-column CSV
(omega in Trad/s, absorption rate in 1/ns per molecule).

All objects are immutable after validation and safe to share between
concurrently running solvers.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .units import DEFAULT_UNITS, UnitSystem


class ConfigError(ValueError):
    """Invalid configuration (parse failure or invariant violation)."""


@dataclass(frozen=True)
class ModeLadder:
    """Transverse cavity spectrum: omega_m = omega0 + m*epsilon, m = 0..m_max.

    Default degeneracies are g_m = m + 1 (2D harmonic trap); an explicit
    tuple overrides them, and polarization_factor = 2 doubles every g_m.
    """

    omega0: float
    epsilon: float
    m_max: int
    degeneracies: tuple[float, ...] | None = None
    polarization_factor: int = 1

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ConfigError(f"ladder.omega0 must be positive, got {self.omega0}")
        if not self.epsilon > 0:
            raise ConfigError(f"ladder.epsilon must be positive, got {self.epsilon}")
        if self.m_max < 1:
            raise ConfigError(f"ladder.m_max must be >= 1, got {self.m_max}")
        if self.polarization_factor not in (1, 2):
            raise ConfigError("ladder.polarization_factor must be 1 or 2")
        if self.degeneracies is not None:
            if len(self.degeneracies) != self.m_max + 1:
                raise ConfigError(
                    f"ladder.degeneracies needs m_max+1 = {self.m_max + 1} entries, "
                    f"got {len(self.degeneracies)}"
                )
            if any(g < 1 for g in self.degeneracies):
                raise ConfigError("ladder.degeneracies must all be >= 1")

    @classmethod
    def two_level(cls, omega0: float, omega_s: float, g_s: float) -> "ModeLadder":
        """Ground mode at omega0 (g=1) plus one excited level at omega_s (g=g_s)."""
        if not omega_s > omega0:
            raise ConfigError(f"two-level omega_s must exceed omega0, got {omega_s}")
        return cls(omega0=omega0, epsilon=omega_s - omega0, m_max=1,
                   degeneracies=(1.0, float(g_s)))

    @property
    def frequencies(self) -> np.ndarray:
        return self.omega0 + self.epsilon * np.arange(self.m_max + 1)

    @property
    def g(self) -> np.ndarray:
        if self.degeneracies is not None:
            base = np.asarray(self.degeneracies, dtype=float)
        else:
            base = np.arange(1, self.m_max + 2, dtype=float)
        return self.polarization_factor * base

    @property
    def omega_max(self) -> float:
        return self.omega0 + self.m_max * self.epsilon


@dataclass(frozen=True)
class AbsorptionProfile:
    """Per-molecule absorption rate vs frequency (1/ns).

    Analytic kinds: "flat" (constant peak_rate) and "gaussian"
    (peak_rate * exp(-(omega-center)^2 / 2 width^2)).  "tabulated" holds
    sorted (omega, rate) pairs with linear interpolation; queries outside
    the tabulated range are errors.
    """

    kind: str
    peak_rate: float = 1.0
    center: float = 0.0
    width: float = 0.0
    table: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("flat", "gaussian", "tabulated"):
            raise ConfigError(f"absorption.kind must be flat|gaussian|tabulated, got {self.kind!r}")
        if self.kind in ("flat", "gaussian") and not self.peak_rate > 0:
            raise ConfigError(f"absorption.peak_rate must be positive, got {self.peak_rate}")
        if self.kind == "gaussian" and not self.width > 0:
            raise ConfigError(f"absorption.width must be positive, got {self.width}")
        if self.kind == "tabulated":
            if not self.table or len(self.table) < 2:
                raise ConfigError("absorption.table needs at least two (omega, rate) pairs")
            om = [p[0] for p in self.table]
            if any(b <= a for a, b in zip(om, om[1:])):
                raise ConfigError("absorption.table frequencies must be strictly increasing")
            if any(p[1] <= 0 for p in self.table):
                raise ConfigError("absorption.table rates must be strictly positive")

    @classmethod
    def flat(cls, rate: float = 1.0) -> "AbsorptionProfile":
        return cls(kind="flat", peak_rate=rate)

    @classmethod
    def gaussian(cls, peak_rate: float, center: float, width: float) -> "AbsorptionProfile":
        return cls(kind="gaussian", peak_rate=peak_rate, center=center, width=width)

    @classmethod
    def from_csv(cls, path: str | Path) -> "AbsorptionProfile":
        pairs = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    pairs.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError) as exc:
                    raise ConfigError(f"bad absorption CSV row {row!r} in {path}") from exc
        return cls(kind="tabulated", table=tuple(pairs))

    def rate(self, omega) -> np.ndarray:
        """Absorption rate at the given frequencies (Trad/s)."""
        omega = np.asarray(omega, dtype=float)
        if self.kind == "flat":
            return np.full(omega.shape, self.peak_rate)
        if self.kind == "gaussian":
            return self.peak_rate * np.exp(-0.5 * ((omega - self.center) / self.width) ** 2)
        om = np.array([p[0] for p in self.table])
        ga = np.array([p[1] for p in self.table])
        if omega.min() < om[0] or omega.max() > om[-1]:
            raise ConfigError(
                f"absorption profile covers [{om[0]}, {om[-1]}] Trad/s but "
                f"[{omega.min()}, {omega.max()}] was requested"
            )
        return np.interp(omega, om, ga)


@dataclass(frozen=True)
class DyeModel:
    """Dye medium: molecule count, zero-phonon line, solvent temperature,
    absorption profile and direct pump/decay rates (1/ns)."""

    n_molecules: float
    omega_d: float
    t_cold: float
    absorption: AbsorptionProfile = field(default_factory=AbsorptionProfile.flat)
    gamma_up: float = 0.0
    gamma_down: float = 0.0

    def __post_init__(self):
        if not self.n_molecules >= 1:
            raise ConfigError(f"dye.n_molecules must be >= 1, got {self.n_molecules}")
        if not self.omega_d > 0:
            raise ConfigError(f"dye.omega_d must be positive, got {self.omega_d}")
        if not self.t_cold > 0:
            raise ConfigError(f"dye.t_cold must be positive, got {self.t_cold}")
        if self.gamma_up < 0 or self.gamma_down < 0:
            raise ConfigError("dye.gamma_up and dye.gamma_down must be >= 0")


@dataclass(frozen=True)
class PumpScenario:
    """Pumping variant.

    kind = "dye": the dye is driven directly (gamma_up/gamma_down in DyeModel);
    cavity photons leak into empty modes at kappa (reservoir occupations 0).
    kind = "external": no direct dye drive; every mode exchanges photons with a
    thermal reservoir at t_hot (K), occupations Bose(omega_m, T_h, mu=0).
    two_level optionally reduces the external ladder to ground + one level
    at omega_s with degeneracy g_s.
    """

    kind: str
    kappa: float = 1e-3
    t_hot: float | None = None
    kappa_per_mode: tuple[float, ...] | None = None
    two_level: tuple[float, float] | None = None  # (omega_s, g_s)

    def __post_init__(self):
        if self.kind not in ("dye", "external"):
            raise ConfigError(f"pump.kind must be dye|external, got {self.kind!r}")
        if self.kappa < 0:
            raise ConfigError(f"pump.kappa must be >= 0, got {self.kappa}")
        if self.kappa_per_mode is not None and any(k < 0 for k in self.kappa_per_mode):
            raise ConfigError("pump.kappa_per_mode entries must be >= 0")
        if self.kind == "external":
            if self.t_hot is None or not self.t_hot > 0:
                raise ConfigError("pump.t_hot must be positive for external pumping")
        if self.two_level is not None:
            if self.kind != "external":
                raise ConfigError("pump.two_level is only meaningful for external pumping")
            omega_s, g_s = self.two_level
            if not g_s >= 1:
                raise ConfigError(f"pump.two_level g_s must be >= 1, got {g_s}")

    def kappa_array(self, n_modes: int) -> np.ndarray:
        if self.kappa_per_mode is not None:
            if len(self.kappa_per_mode) != n_modes:
                raise ConfigError(
                    f"pump.kappa_per_mode needs {n_modes} entries, got {len(self.kappa_per_mode)}"
                )
            return np.asarray(self.kappa_per_mode, dtype=float)
        return np.full(n_modes, self.kappa)


@dataclass(frozen=True)
class SolverSettings:
    """Steady-state and integrator tolerances."""

    residual_tol: float = 1e-10  # relative to the gross per-mode flux
    max_iterations: int = 200
    rtol: float = 1e-10          # time integrator, per component
    atol: float = 1e-14

    def __post_init__(self):
        if not self.residual_tol > 0 or not self.rtol > 0 or not self.atol > 0:
            raise ConfigError("solver tolerances must be positive")
        if self.max_iterations < 1:
            raise ConfigError("solver.max_iterations must be >= 1")


@dataclass(frozen=True)
class ScenarioConfig:
    ladder: ModeLadder
    dye: DyeModel
    pump: PumpScenario
    solver: SolverSettings = field(default_factory=SolverSettings)
    units: UnitSystem = field(default_factory=lambda: DEFAULT_UNITS)

    def effective_ladder(self) -> ModeLadder:
        """Ladder actually simulated; the two-level reduction replaces it."""
        if self.pump.two_level is not None:
            omega_s, g_s = self.pump.two_level
            return ModeLadder.two_level(self.ladder.omega0, omega_s, g_s)
        return self.ladder

    def to_dict(self) -> dict:
        lad: dict = {"omega0": self.ladder.omega0, "epsilon": self.ladder.epsilon,
                     "m_max": self.ladder.m_max,
                     "polarization_factor": self.ladder.polarization_factor}
        if self.ladder.degeneracies is not None:
            lad["degeneracies"] = list(self.ladder.degeneracies)
        ab: dict = {"kind": self.dye.absorption.kind}
        if self.dye.absorption.kind in ("flat", "gaussian"):
            ab["peak_rate"] = self.dye.absorption.peak_rate
        if self.dye.absorption.kind == "gaussian":
            ab["center"] = self.dye.absorption.center
            ab["width"] = self.dye.absorption.width
        if self.dye.absorption.kind == "tabulated":
            ab["table"] = [list(p) for p in self.dye.absorption.table]
        dye = {"n_molecules": self.dye.n_molecules, "omega_d": self.dye.omega_d,
               "t_cold": self.dye.t_cold, "gamma_up": self.dye.gamma_up,
               "gamma_down": self.dye.gamma_down, "absorption": ab}
        pump: dict = {"kind": self.pump.kind, "kappa": self.pump.kappa}
        if self.pump.t_hot is not None:
            pump["t_hot"] = self.pump.t_hot
        if self.pump.kappa_per_mode is not None:
            pump["kappa_per_mode"] = list(self.pump.kappa_per_mode)
        if self.pump.two_level is not None:
            pump["two_level"] = {"omega_s": self.pump.two_level[0],
                                 "g_s": self.pump.two_level[1]}
        solver = {"residual_tol": self.solver.residual_tol,
                  "max_iterations": self.solver.max_iterations,
                  "rtol": self.solver.rtol, "atol": self.solver.atol}
        return {"ladder": lad, "dye": dye, "pump": pump, "solver": solver,
                "units": {"boltzmann_over_hbar": self.units.boltzmann_over_hbar}}

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "ScenarioConfig":
        try:
            lad = dict(data["ladder"])
            dye = dict(data["dye"])
            pump = dict(data["pump"])
        except KeyError as exc:
            raise ConfigError(f"missing config section {exc}") from None
        if "degeneracies" in lad:
            lad["degeneracies"] = tuple(float(g) for g in lad["degeneracies"])
        ladder = ModeLadder(**lad)

        ab = dict(dye.pop("absorption", {"kind": "flat"}))
        if "csv" in ab:
            path = Path(ab.pop("csv"))
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            profile = AbsorptionProfile.from_csv(path)
        elif "table" in ab:
            ab["table"] = tuple((float(a), float(b)) for a, b in ab["table"])
            profile = AbsorptionProfile(**ab)
        else:
            profile = AbsorptionProfile(**ab)
        dye_model = DyeModel(absorption=profile, **dye)

        if "two_level" in pump:
            tl = pump.pop("two_level")
            pump["two_level"] = (float(tl["omega_s"]), float(tl["g_s"]))
        if "kappa_per_mode" in pump:
            pump["kappa_per_mode"] = tuple(float(k) for k in pump["kappa_per_mode"])
        scenario = PumpScenario(**pump)

        solver = SolverSettings(**data.get("solver", {}))
        units = UnitSystem(**data.get("units", {}))
        return cls(ladder=ladder, dye=dye_model, pump=scenario, solver=solver, units=units)


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a TOML (or JSON) configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib

    try:
        if path.suffix == ".json":
            data = json.loads(path.read_text())
        else:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    try:
        return ScenarioConfig.from_dict(data, base_dir=path.parent)
    except TypeError as exc:
        raise ConfigError(f"bad config field in {path}: {exc}") from exc


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__} to TOML")


def _toml_dump(data: dict, prefix: str = "") -> str:
    scalars = {k: v for k, v in data.items() if not isinstance(v, dict)}
    tables = {k: v for k, v in data.items() if isinstance(v, dict)}
    out = []
    if prefix and scalars:
        out.append(f"[{prefix}]")
    out.extend(f"{k} = {_toml_value(v)}" for k, v in scalars.items())
    for k, v in tables.items():
        out.append("")
        out.append(_toml_dump(v, f"{prefix}.{k}" if prefix else k))
    return "\n".join(out)


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    """Write a configuration back to TOML (lossless round trip)."""
    Path(path).write_text(_toml_dump(config.to_dict()).lstrip("\n") + "\n")


def config_hash(config: ScenarioConfig) -> str:
    import hashlib

    blob = json.dumps(config.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()
