"""Coupled rate equations for mode occupations and dye excitation, a
time-domain adaptive Runge-Kutta integrator, and the steady-state solver.

Mode occupations n_m evolve under dye emission/absorption plus exchange with
per-mode reservoirs (empty ones for mirror loss, thermal ones for external
pumping); the dye excited fraction p_e evolves under the matching photon
fluxes plus direct pump/decay.

The steady-state solver exploits the structure of the equations: given p_e,
each mode's balance is scalar-linear and solved exactly; the remaining scalar
condition on p_e is the total particle balance (direct pump input plus net
reservoir flux equals zero), located by bracketed root finding between
p_e = 0 and the gain-clamp boundary where a mode denominator turns
nonpositive.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .config import ScenarioConfig, SolverSettings
from .rates import bose_occupation, build_rate_table
from .units import DEFAULT_UNITS


class SteadyStateError(RuntimeError):
    """Steady-state solve failed."""


class RunawayInversionError(SteadyStateError):
    """Gain exceeds every loss channel: the photon number diverges and no
    steady state exists for this parameter set."""


class DegenerateModelError(SteadyStateError):
    """No gain or loss channel couples the photon number to a reservoir
    (closed system); use solve_dye_only with a prescribed photon number."""


class IntegrationError(RuntimeError):
    """Adaptive integration failed (step-size underflow)."""

    def __init__(self, message: str, t_reached: float):
        super().__init__(message)
        self.t_reached = t_reached


@dataclass(frozen=True)
class KineticModel:
    """Immutable bundle of everything the rate equations need."""

    omega: np.ndarray        # mode frequencies, Trad/s
    g: np.ndarray            # degeneracies
    gamma_em: np.ndarray     # per-molecule emission rates, 1/ns
    gamma_abs: np.ndarray    # per-molecule absorption rates, 1/ns
    n_molecules: float
    kappa: np.ndarray        # per-mode reservoir coupling / loss, 1/ns
    n_res: np.ndarray        # reservoir occupations (zeros for mirror loss)
    gamma_up: float          # direct dye pump, 1/ns
    gamma_down: float        # direct dye decay, 1/ns
    omega_d: float
    t_cold_freq: float       # solvent temperature, Trad/s
    t_hot: float | None      # reservoir temperature, K (external pumping)
    scenario: str            # "dye" | "external"

    @property
    def n_modes(self) -> int:
        return self.omega.size

    @property
    def rate_scale(self) -> float:
        return max(
            self.n_molecules * float(self.gamma_abs.max()),
            self.n_molecules * float(self.gamma_em.max()),
            float(self.kappa.max()),
            self.gamma_up, self.gamma_down,
        )


def build_model(config: ScenarioConfig) -> KineticModel:
    """Assemble a KineticModel from a validated configuration.

    For external pumping the direct dye drive is switched off and every mode
    exchanges photons with a Bose-populated reservoir at t_hot.
    """
    ladder = config.effective_ladder()
    table = build_rate_table(ladder, config.dye, config.units)
    kappa = config.pump.kappa_array(ladder.m_max + 1)
    if config.pump.kind == "external":
        t_hot_freq = config.units.temperature_to_frequency(config.pump.t_hot)
        n_res = np.asarray(bose_occupation(ladder.frequencies, t_hot_freq))
        gamma_up = gamma_down = 0.0
        t_hot = config.pump.t_hot
    else:
        n_res = np.zeros(ladder.m_max + 1)
        gamma_up, gamma_down = config.dye.gamma_up, config.dye.gamma_down
        t_hot = None
    return KineticModel(
        omega=ladder.frequencies, g=ladder.g,
        gamma_em=table.gamma_em, gamma_abs=table.gamma_abs,
        n_molecules=config.dye.n_molecules, kappa=kappa, n_res=n_res,
        gamma_up=gamma_up, gamma_down=gamma_down,
        omega_d=config.dye.omega_d, t_cold_freq=table.t_cold_freq,
        t_hot=t_hot, scenario=config.pump.kind,
    )


def model_at_t_hot(config: ScenarioConfig, t_hot: float) -> KineticModel:
    """Model with the pump strength set by a hot temperature t_hot (K).

    External pumping: the reservoir temperature itself.  Dye pumping: the
    pump rate ratio is set through gamma_up = gamma_down * exp(-omega_d/T_h).
    """
    if config.pump.kind == "external":
        return build_model(replace(config, pump=replace(config.pump, t_hot=t_hot)))
    tau_h = config.units.temperature_to_frequency(t_hot)
    if config.dye.gamma_down <= 0:
        raise ValueError("dye-pumped temperature sweep needs dye.gamma_down > 0")
    gamma_up = config.dye.gamma_down * math.exp(-config.dye.omega_d / tau_h)
    model = build_model(replace(config, dye=replace(config.dye, gamma_up=gamma_up)))
    return replace(model, t_hot=t_hot)


@dataclass
class SystemState:
    n: np.ndarray
    p_e: float

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=float)
        if np.any(self.n < 0):
            raise ValueError("mode occupations must be nonnegative")
        if not 0.0 <= self.p_e <= 1.0:
            raise ValueError(f"p_e must lie in [0, 1], got {self.p_e}")


def rhs(n: np.ndarray, p_e: float, model: KineticModel):
    """Time derivatives (ndot per mode, pedot), time in ns."""
    p_g = 1.0 - p_e
    dye = model.n_molecules * (model.gamma_em * (n + 1.0) * p_e
                               - model.gamma_abs * n * p_g)
    res = model.kappa * (model.n_res * (n + 1.0) - (model.n_res + 1.0) * n)
    ndot = dye + res
    gdn_tot = float(np.sum(model.g * model.gamma_em * (n + 1.0)))
    gup_tot = float(np.sum(model.g * model.gamma_abs * n))
    pedot = -(gdn_tot + model.gamma_down) * p_e + (gup_tot + model.gamma_up) * p_g
    return ndot, pedot


def _residuals(n: np.ndarray, p_e: float, model: KineticModel):
    """Absolute (degeneracy-weighted) and gross-flux-relative residuals."""
    ndot, pedot = rhs(n, p_e, model)
    p_g = 1.0 - p_e
    gross_n = (model.n_molecules * (model.gamma_em * (n + 1.0) * p_e
                                    + model.gamma_abs * n * p_g)
               + model.kappa * (model.n_res * (n + 1.0) + (model.n_res + 1.0) * n))
    gdn_tot = float(np.sum(model.g * model.gamma_em * (n + 1.0)))
    gup_tot = float(np.sum(model.g * model.gamma_abs * n))
    gross_pe = (gdn_tot + model.gamma_down) * p_e + (gup_tot + model.gamma_up) * p_g
    floor = 1e-300
    res_abs = max(float(np.max(np.abs(ndot) * model.g)), abs(pedot))
    res_rel = max(float(np.max(np.abs(ndot) / (gross_n + floor))),
                  abs(pedot) / (gross_pe + floor))
    return res_abs, res_rel


# ---------------------------------------------------------------------------
# Steady state


@dataclass
class SteadyState:
    n: np.ndarray
    p_e: float
    n_res: np.ndarray
    residual_abs: float
    residual_rel: float
    iterations: int
    converged: bool
    g: np.ndarray
    omega: np.ndarray
    t_fit: float | None = None   # frequency units
    mu_fit: float | None = None

    @property
    def n_photon(self) -> float:
        return float(np.sum(self.g * self.n))

    @property
    def condensate_fraction(self) -> float:
        total = self.n_photon
        return float(self.g[0] * self.n[0] / total) if total > 0 else 0.0


def _modes_given_pe(p_e: float, model: KineticModel) -> np.ndarray:
    den = (model.n_molecules * (model.gamma_abs * (1.0 - p_e)
                                - model.gamma_em * p_e) + model.kappa)
    num = model.n_molecules * model.gamma_em * p_e + model.kappa * model.n_res
    return num / den


def _particle_balance(p_e: float, model: KineticModel) -> float:
    """Net particle injection with every mode at its balance point: direct
    dye pumping plus reservoir influx.  Zero exactly at the steady state."""
    n = _modes_given_pe(p_e, model)
    direct = model.n_molecules * (model.gamma_up * (1.0 - p_e)
                                  - model.gamma_down * p_e)
    reservoir = float(np.sum(model.kappa * model.g * (model.n_res - n)))
    return direct + reservoir


def solve_steady_state(model: KineticModel,
                       settings: SolverSettings = SolverSettings(),
                       fit_ground_excluded: bool = True) -> SteadyState:
    """Steady state of the kinetic equations.

    Raises RunawayInversionError when the photon number diverges (gain cannot
    be clamped by any p_e below the inversion boundary) and
    DegenerateModelError for closed systems.
    """
    if (model.gamma_up == 0.0 and model.gamma_down == 0.0
            and not np.any(model.kappa > 0)):
        raise DegenerateModelError(
            "no gain/loss channel; fix the photon number with solve_dye_only")

    # Largest p_e keeping every per-mode denominator positive (gain clamp).
    p_clamp = float(np.min(
        (model.gamma_abs + model.kappa / model.n_molecules)
        / (model.gamma_abs + model.gamma_em)))
    hi = min(p_clamp * (1.0 - 1e-13), 1.0 - 1e-16)

    balance_lo = _particle_balance(0.0, model)
    if balance_lo <= 0.0:
        # Nothing injects particles: the vacuum is the steady state.
        n = _modes_given_pe(0.0, model)
        res_abs, res_rel = _residuals(n, 0.0, model)
        return _finish_steady(n, 0.0, model, settings, 0, res_abs, res_rel,
                              fit_ground_excluded)
    if _particle_balance(hi, model) > 0.0:
        raise RunawayInversionError(
            f"no steady state: particle gain persists up to the inversion "
            f"clamp p_e = {hi:.6g} (photon number diverges; add loss or "
            f"reduce pumping)")

    p_e, info = brentq(_particle_balance, 0.0, hi, args=(model,),
                       xtol=1e-15, rtol=8.9e-16,
                       maxiter=max(settings.max_iterations, 100),
                       full_output=True)
    if not info.converged:
        raise SteadyStateError(f"root finding for p_e did not converge: {info}")
    if p_e < 1e-8:
        # near-equilibrium roots can lie below the absolute xtol; refine in
        # log space where the tolerance is relative
        try:
            u = brentq(lambda u: _particle_balance(math.exp(u), model),
                       math.log(1e-300), math.log(max(p_e * 2.0, 1e-14)),
                       xtol=1e-12, rtol=8.9e-16, maxiter=300)
            p_e = math.exp(u)
        except ValueError:
            pass  # no sign change in the log bracket: keep the linear root
    n = _modes_given_pe(p_e, model)
    res_abs, res_rel = _residuals(n, p_e, model)
    if res_rel > settings.residual_tol:
        raise SteadyStateError(
            f"steady-state residual {res_rel:.3e} above tolerance "
            f"{settings.residual_tol:.3e}")
    return _finish_steady(n, p_e, model, settings, info.iterations,
                          res_abs, res_rel, fit_ground_excluded)


def _finish_steady(n, p_e, model, settings, iterations, res_abs, res_rel,
                   fit_ground_excluded) -> SteadyState:
    steady = SteadyState(
        n=n, p_e=p_e, n_res=model.n_res.copy(),
        residual_abs=res_abs, residual_rel=res_rel,
        iterations=iterations, converged=res_rel <= settings.residual_tol,
        g=model.g.copy(), omega=model.omega.copy(),
    )
    try:
        t_fit, mu_fit = fit_distribution(steady, exclude_ground=fit_ground_excluded)
        steady.t_fit, steady.mu_fit = t_fit, mu_fit
    except ValueError:
        pass
    return steady


def solve_dye_only(model: KineticModel, n_photon: float,
                   settings: SolverSettings = SolverSettings()) -> SteadyState:
    """Steady state of a closed system (kappa = gamma_up = gamma_down = 0)
    at a prescribed total photon number.

    The photon number is conserved, so the stationary family is
    parameterized by it; the matching p_e is located by root finding.
    """
    if np.any(model.kappa > 0) or model.gamma_up > 0 or model.gamma_down > 0:
        raise ValueError("solve_dye_only requires a closed model")
    if not n_photon > 0:
        raise ValueError("n_photon must be positive")
    p_clamp = float(np.min(model.gamma_abs / (model.gamma_abs + model.gamma_em)))
    hi = p_clamp * (1.0 - 1e-13)

    def excess(p_e):
        return float(np.sum(model.g * _modes_given_pe(p_e, model))) - n_photon

    lo = 1e-18
    while excess(lo) > 0:
        lo *= 1e-2
        if lo < 1e-280:
            raise SteadyStateError("cannot bracket p_e from below")
    p_e = brentq(excess, lo, hi, xtol=1e-16, rtol=8.9e-16, maxiter=200)
    n = _modes_given_pe(p_e, model)
    res_abs, res_rel = _residuals(n, p_e, model)
    return _finish_steady(n, p_e, model, settings, 0, res_abs, res_rel, True)


def fit_distribution(steady: SteadyState, exclude_ground: bool = True):
    """Least-squares fit of ln(1 + 1/n_m) = (omega_m - mu)/T over populated
    excited modes; returns (T, mu) in frequency units."""
    start = 1 if exclude_ground else 0
    omega = steady.omega[start:]
    n = steady.n[start:]
    mask = n > 1e-12
    if int(mask.sum()) < 10:
        raise ValueError("insufficient populated modes for a distribution fit")
    y = np.log1p(1.0 / n[mask])
    slope, intercept = np.polyfit(omega[mask], y, 1)
    if slope <= 0:
        raise ValueError("non-thermal occupation ordering; fit has no temperature")
    return 1.0 / slope, -intercept / slope


# ---------------------------------------------------------------------------
# Time integration (Dormand-Prince 5(4), per-component error control)

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                   187 / 2100, 1 / 40])


@dataclass
class Trajectory:
    t: np.ndarray
    n: np.ndarray            # shape (len(t), n_modes)
    p_e: np.ndarray
    steps: int
    rejected: int

    @property
    def final(self) -> SystemState:
        return SystemState(n=self.n[-1].copy(), p_e=float(self.p_e[-1]))


def _rhs_vec(y: np.ndarray, model: KineticModel) -> np.ndarray:
    ndot, pedot = rhs(y[:-1], y[-1], model)
    return np.concatenate([ndot, [pedot]])


def evolve(state0: SystemState, model: KineticModel, t_end: float,
           rtol: float = 1e-10, atol: float = 1e-14,
           max_step: float = math.inf, record: bool = True,
           max_steps: int = 5_000_000) -> Trajectory:
    """Integrate the kinetic equations from t = 0 to t_end (ns).

    Steps are rejected both on the embedded error estimate and whenever they
    would push an occupation below zero or p_e outside [0, 1] by more than
    roundoff slack; accepted states are clamped back into bounds.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    y = np.concatenate([state0.n.astype(float), [state0.p_e]])
    t = 0.0
    f = _rhs_vec(y, model)
    neg_slack = 100.0 * atol

    scale0 = atol + rtol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / scale0) ** 2)))
    d1 = float(np.sqrt(np.mean((f / scale0) ** 2)))
    h = min(max_step, t_end, 0.01 * d0 / d1 if d1 > 0 else t_end / 100)
    if h <= 0:
        h = t_end / 100

    ts, ns, ps = [0.0], [y[:-1].copy()], [y[-1]]
    steps = rejected = 0
    k = np.empty((7, y.size))
    while t < t_end:
        if steps + rejected > max_steps:
            raise IntegrationError(f"step budget exhausted at t = {t:.6g} ns", t)
        h = min(h, t_end - t)
        if h < 1e-15 * max(t, t_end * 1e-6):
            raise IntegrationError(f"step size underflow at t = {t:.6g} ns", t)
        k[0] = f
        for i in range(1, 7):
            yi = y + h * (_DP_A[i] @ k[:i])
            k[i] = _rhs_vec(yi, model)
        y5 = y + h * (_DP_B5 @ k)
        err = h * ((_DP_B5 - _DP_B4) @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))

        bounds_ok = (y5[:-1].min() >= -neg_slack
                     and -neg_slack <= y5[-1] <= 1.0 + neg_slack)
        if err_norm <= 1.0 and bounds_ok:
            t += h
            clipped = y5[:-1].min() < 0.0 or not 0.0 <= y5[-1] <= 1.0
            np.clip(y5[:-1], 0.0, None, out=y5[:-1])
            y5[-1] = min(max(y5[-1], 0.0), 1.0)
            y = y5.copy()
            # FSAL: the last stage was evaluated at y5 unless clipping moved it.
            f = _rhs_vec(y, model) if clipped else k[6].copy()
            steps += 1
            if record:
                ts.append(t)
                ns.append(y[:-1].copy())
                ps.append(y[-1])
            factor = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
            h = min(max_step, h * factor)
        else:
            rejected += 1
            h *= 0.5 if not bounds_ok else max(0.2, min(0.9 * err_norm ** -0.2, 0.9))
    if not record:
        ts, ns, ps = [t], [y[:-1].copy()], [y[-1]]
    return Trajectory(t=np.array(ts), n=np.array(ns), p_e=np.array(ps),
                      steps=steps, rejected=rejected)


# ---------------------------------------------------------------------------
# Serialization


def steady_state_to_csv(steady: SteadyState, path: str | Path) -> None:
    """Columns m, g_m, omega_m, n_m, n_m_h with summary values in a leading
    comment header."""
    t_fit = "" if steady.t_fit is None else f"{steady.t_fit:.17g}"
    mu_fit = "" if steady.mu_fit is None else f"{steady.mu_fit:.17g}"
    with open(path, "w", newline="") as fh:
        fh.write(f"# p_e={steady.p_e:.17g} N_ph={steady.n_photon:.17g} "
                 f"f0={steady.condensate_fraction:.17g} "
                 f"T_fit={t_fit} mu_fit={mu_fit} "
                 f"residual={steady.residual_rel:.3g} "
                 f"converged={int(steady.converged)}\n")
        writer = csv.writer(fh)
        writer.writerow(["m", "g_m", "omega_m", "n_m", "n_m_h"])
        for m in range(steady.n.size):
            writer.writerow([m, f"{steady.g[m]:.17g}", f"{steady.omega[m]:.17g}",
                             f"{steady.n[m]:.17g}", f"{steady.n_res[m]:.17g}"])
