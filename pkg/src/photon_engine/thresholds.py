"""Condensation-threshold calculators.

Analytic: the reversible dye-pumped / two-level limits T_h = T_c w/(w - w0).
Semi-analytic: the continuum particle-balance condition equating the Bose
integral of the trapped gas at (T_c, mu = omega_0) with that of the hot
reservoir at (T_h, mu = 0).  Numeric: condensate-fraction crossing extracted
from steady-state scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .config import ModeLadder, ScenarioConfig
from .kinetics import (RunawayInversionError, SteadyStateError, model_at_t_hot,
                       solve_steady_state)
from .rates import bose_occupation
from .units import DEFAULT_UNITS, UnitSystem

T_HOT_CEILING = 1e9  # K; no sign change below this means the model cannot condense


@dataclass
class ThresholdResult:
    t_hot_critical: float            # K
    method: str                      # reversible-dye | two-level | continuum | numeric
    residual: float = 0.0
    bracket: tuple[float, float] | None = None
    aux: dict = field(default_factory=dict)


def reversible_dye_threshold(omega0: float, omega_d: float, t_cold: float) -> float:
    """Reversible (kappa -> 0) dye-pumped threshold T_h = T_c w_d/(w_d - w_0), K."""
    if not omega_d > omega0 > 0:
        raise ValueError(f"need omega_d > omega0 > 0, got {omega_d}, {omega0}")
    if not t_cold > 0:
        raise ValueError(f"t_cold must be positive, got {t_cold}")
    return t_cold * omega_d / (omega_d - omega0)


def two_level_threshold(omega0: float, omega_s: float, t_cold: float) -> float:
    """Two-level externally pumped threshold; same form with omega_s."""
    if omega0 == 0.0:
        return t_cold
    return reversible_dye_threshold(omega0, omega_s, t_cold)


def bose_integral(rho: Callable[[float], float], omega0: float,
                  temperature: float, mu: float, omega_max: float) -> float:
    """Particle number integral of rho(w)/(exp((w-mu)/T) - 1) over
    [omega0, omega_max], everything in frequency units.

    At mu = omega0 the integrable edge behaviour (rho vanishing linearly)
    is handled by the quadrature never sampling the endpoint itself.
    """
    if mu > omega0:
        raise ValueError(f"mu must not exceed omega0, got mu={mu}, omega0={omega0}")
    if not omega_max > omega0:
        raise ValueError("omega_max must exceed omega0")
    if not temperature > 0:
        raise ValueError("temperature must be positive")

    def integrand(w):
        x = (w - mu) / temperature
        if x <= 0:
            return 0.0
        return rho(w) * math.exp(-x) / -math.expm1(-x)

    value, err = quad(integrand, omega0, omega_max, epsabs=0.0, epsrel=1e-11,
                      limit=200)
    if value > 0 and err > 1e-8 * value:
        raise RuntimeError(f"quadrature did not converge: value={value}, err={err}")
    return value


def harmonic_dos(ladder: ModeLadder) -> Callable[[float], float]:
    """Continuum density of states of the 2D harmonic ladder.

    rho(w) = (w - omega0)/epsilon^2, the form consistent with the discrete
    state count sum(m+1) and with N_th = pi^2 T^2 / 6 eps^2.
    """
    omega0, eps2 = ladder.omega0, ladder.epsilon ** 2
    factor = ladder.polarization_factor
    return lambda w: factor * (w - omega0) / eps2


def critical_number(t_cold: float, epsilon: float,
                    units: UnitSystem = DEFAULT_UNITS) -> float:
    """Critical photon number of the 2D harmonic trap,
    N_th = (pi^2/6) (T_c/epsilon)^2 with T_c in frequency units."""
    if not t_cold > 0 or not epsilon > 0:
        raise ValueError("t_cold and epsilon must be positive")
    tau_c = units.temperature_to_frequency(t_cold)
    return math.pi ** 2 / 6.0 * (tau_c / epsilon) ** 2


def discrete_critical_number(ladder: ModeLadder, t_cold: float,
                             units: UnitSystem = DEFAULT_UNITS) -> float:
    """Excited-state capacity of the discrete ladder at mu = omega0:
    sum over m >= 1 of g_m / (exp((omega_m - omega0)/T_c) - 1)."""
    tau_c = units.temperature_to_frequency(t_cold)
    omega = ladder.frequencies[1:]
    g = ladder.g[1:]
    return float(np.sum(g * bose_occupation(omega, tau_c, mu=ladder.omega0)))


def mean_hot_energy(ladder: ModeLadder, t_hot: float,
                    units: UnitSystem = DEFAULT_UNITS) -> float:
    """Mean energy per particle of the hot reservoir on the ladder, Trad/s."""
    if not t_hot > 0:
        raise ValueError("t_hot must be positive")
    tau_h = units.temperature_to_frequency(t_hot)
    n_h = bose_occupation(ladder.frequencies, tau_h)
    g = ladder.g
    return float(np.sum(g * ladder.frequencies * n_h) / np.sum(g * n_h))


def continuum_threshold(ladder: ModeLadder, t_cold: float,
                        omega_max: float | None = None,
                        units: UnitSystem = DEFAULT_UNITS) -> ThresholdResult:
    """Solve the continuum particle balance for the critical T_h.

    The reservoir-side integral is strictly increasing in T_h, so the root
    is bracketed by geometric growth from T_c and located to 1e-6 K.
    """
    if omega_max is None:
        omega_max = ladder.omega_max
    rho = harmonic_dos(ladder)
    tau_c = units.temperature_to_frequency(t_cold)
    lhs = bose_integral(rho, ladder.omega0, tau_c, ladder.omega0, omega_max)

    def gap(t_hot_kelvin):
        tau_h = units.temperature_to_frequency(t_hot_kelvin)
        return bose_integral(rho, ladder.omega0, tau_h, 0.0, omega_max) - lhs

    t_lo, t_hi = t_cold, 2.0 * t_cold
    while gap(t_hi) < 0:
        t_lo, t_hi = t_hi, 2.0 * t_hi
        if t_hi > T_HOT_CEILING:
            raise ValueError(
                f"no condensation threshold below {T_HOT_CEILING:.1e} K "
                f"(omega_max too small for the requested T_c?)")
    t_crit = brentq(gap, t_lo, t_hi, xtol=1e-6)
    return ThresholdResult(
        t_hot_critical=float(t_crit), method="continuum",
        residual=abs(gap(t_crit)) / lhs, bracket=(t_lo, t_hi),
        aux={"n_th": lhs, "omega_max": omega_max, "t_cold": t_cold},
    )


def numeric_threshold(config: ScenarioConfig, t_hot_grid: Sequence[float],
                      f0_threshold: float = 0.01,
                      refine_rel_tol: float = 1e-4) -> ThresholdResult:
    """Threshold from steady-state scans: the T_h where the condensate
    fraction crosses f0_threshold, refined by bisection.

    A runaway solve (possible for dye pumping with kappa = 0) counts as
    condensed.  The T_h where the fitted chemical potential approaches
    omega_0 is reported alongside as a secondary estimator.
    """
    grid = np.sort(np.asarray(t_hot_grid, dtype=float))
    if grid.size < 2:
        raise ValueError("t_hot_grid needs at least two points")

    def condensate_fraction(t_hot):
        try:
            steady = solve_steady_state(model_at_t_hot(config, t_hot),
                                        config.solver)
        except RunawayInversionError:
            return math.inf, None
        return steady.condensate_fraction, steady.mu_fit

    f0s, mu_fits = [], []
    for t_hot in grid:
        f0, mu_fit = condensate_fraction(t_hot)
        f0s.append(f0)
        mu_fits.append(mu_fit)

    crossing = None
    for i in range(len(grid) - 1):
        if f0s[i] < f0_threshold <= f0s[i + 1]:
            crossing = i
            break
    if crossing is None:
        raise SteadyStateError(
            f"no crossing of f0 = {f0_threshold} in "
            f"[{grid[0]:.6g}, {grid[-1]:.6g}] K")

    lo, hi = float(grid[crossing]), float(grid[crossing + 1])
    bracket = (lo, hi)
    while hi - lo > refine_rel_tol * hi:
        mid = 0.5 * (lo + hi)
        f0, _ = condensate_fraction(mid)
        if f0 >= f0_threshold:
            hi = mid
        else:
            lo = mid
    t_crit = 0.5 * (lo + hi)

    # Secondary estimator: mu_fit reaching omega_0 - 0.01 T_c.
    tau_c = config.units.temperature_to_frequency(config.dye.t_cold)
    mu_target = config.effective_ladder().omega0 - 0.01 * tau_c
    t_mu = None
    for i in range(len(grid) - 1):
        a, b = mu_fits[i], mu_fits[i + 1]
        if a is not None and b is not None and a < mu_target <= b:
            t_mu = float(grid[i] + (grid[i + 1] - grid[i])
                         * (mu_target - a) / (b - a))
            break
    return ThresholdResult(
        t_hot_critical=t_crit, method="numeric",
        residual=(hi - lo) / t_crit, bracket=bracket,
        aux={"f0_threshold": f0_threshold, "t_hot_mu_crossing": t_mu,
             "grid_f0": list(zip(grid.tolist(), f0s))},
    )
