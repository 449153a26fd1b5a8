"""Heat-engine bookkeeping on steady states.

Energy rates are in Trad/s per ns (hbar = 1); entropy rates in 1/ns.

Work is identified with the coherent condensate emission: the ground-mode
output power for dye pumping, and the ground mode's net emission back into
the reservoir for external pumping.  Back-emission from excited modes is not
coherent output and is netted into the hot-bath current, which keeps exact
energy closure J_hot = W + J_cold and makes the Carnot bound equivalent to
nonnegative bath entropy production.

For dye pumping the mirror-loss channel radiates into empty modes and the
emitted light carries entropy; sigma_radiation accounts for it with the
standard beam-entropy rate kappa*g*((n+1)ln(n+1) - n ln n).  The bath-side
piece alone (sigma_bath = J_cold/T_c - J_hot/T_h) is negative below
threshold exactly because that channel is ignored; sigma = sigma_bath +
sigma_radiation is the physical, nonnegative total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinetics import KineticModel, SteadyState
from .units import DEFAULT_UNITS, UnitSystem

_STEADY_TOL = 1e-8  # relative residual above which input is rejected as non-steady


@dataclass
class ThermoReport:
    scenario: str
    t_cold: float                 # K
    t_hot: float | None           # K (None for an unpumped dye model)
    j_hot: float                  # power drawn from the hot bath
    j_cold: float                 # power delivered to the cold bath (solvent)
    work: float                   # condensate output power
    l_incoherent: float           # non-condensate photon loss power (dye pumping)
    eta: float
    eta_carnot: float
    sigma: float                  # total entropy production rate, 1/ns
    sigma_bath: float             # J_cold/T_c - J_hot/T_h alone
    sigma_radiation: float        # entropy carried by light lost to empty modes
    work_strict: float | None = None  # external: full negative-flux sum


def _check_steady(steady: SteadyState):
    if steady.residual_rel > _STEADY_TOL:
        raise ValueError(
            f"input is not a steady state (relative residual "
            f"{steady.residual_rel:.3e})")


def _beam_entropy_rate(kappa: np.ndarray, g: np.ndarray, n: np.ndarray) -> float:
    """Entropy flux of light radiated into empty modes at rate kappa."""
    n = np.asarray(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        per_mode = np.where(n > 0, n * np.log1p(1.0 / np.maximum(n, 1e-300))
                            + np.log1p(n), 0.0)
    return float(np.sum(kappa * g * per_mode))


def currents_dye_pumped(steady: SteadyState, model: KineticModel,
                        units: UnitSystem = DEFAULT_UNITS) -> ThermoReport:
    """Currents and efficiency for the dye-pumped scenario.

    J_hot is the pump power, omega_d per net dye excitation; both it and the
    heat to the solvent use the steady-state identity that each mode's net
    dye emission equals its mirror loss kappa_m n_m, which avoids
    catastrophic cancellation at large occupations.
    """
    if model.scenario != "dye":
        raise ValueError("currents_dye_pumped needs a dye-pumped model")
    _check_steady(steady)
    n, p_e = steady.n, steady.p_e
    g, omega, kappa = model.g, model.omega, model.kappa
    tau_c = model.t_cold_freq

    # At steady state the net pump excitation rate equals the total mirror
    # photon flux; evaluating both currents through that flux keeps the
    # energy closure J_hot = J_cold + W + L exact instead of limited by the
    # conditioning of p_e near threshold.
    flux = float(np.sum(g * kappa * n))
    j_hot = model.omega_d * flux
    j_cold = float(np.sum(g * (model.omega_d - omega) * kappa * n))
    work = float(g[0] * kappa[0] * omega[0] * n[0])
    l_incoherent = float(np.sum(g[1:] * kappa[1:] * omega[1:] * n[1:]))

    if model.t_hot is not None:
        t_hot = model.t_hot
    elif model.gamma_up > 0 and model.gamma_down > 0:
        tau_h = -model.omega_d / math.log(model.gamma_up / model.gamma_down)
        t_hot = units.frequency_to_temperature(tau_h)
    else:
        t_hot = None

    eta = work / j_hot if j_hot > 0 else 0.0
    if t_hot is not None and t_hot > 0:
        tau_h = units.temperature_to_frequency(t_hot)
        eta_carnot = 1.0 - tau_c / tau_h
        sigma_bath = j_cold / tau_c - j_hot / tau_h
    else:
        eta_carnot = 0.0
        sigma_bath = 0.0
    sigma_radiation = _beam_entropy_rate(kappa, g, n)
    return ThermoReport(
        scenario="dye", t_cold=units.frequency_to_temperature(tau_c),
        t_hot=t_hot, j_hot=j_hot, j_cold=j_cold, work=work,
        l_incoherent=l_incoherent, eta=eta, eta_carnot=eta_carnot,
        sigma=sigma_bath + sigma_radiation, sigma_bath=sigma_bath,
        sigma_radiation=sigma_radiation,
    )


def currents_external(steady: SteadyState, model: KineticModel,
                      units: UnitSystem = DEFAULT_UNITS) -> ThermoReport:
    """Currents and efficiency for external (thermal-reservoir) pumping.

    Per-mode reservoir energy flux j_m = g_m kappa_m omega_m (n_m^h - n_m).
    The condensate mode's net emission is the work output; everything else,
    including tiny excited-mode back-emission, is heat exchanged with the
    hot bath.  J_cold (heat into the solvent via the dye) equals sum(j_m)
    in steady state and is evaluated in that cancellation-free form.
    """
    if model.scenario != "external":
        raise ValueError("currents_external needs an externally pumped model")
    _check_steady(steady)
    n = steady.n
    g, omega, kappa = model.g, model.omega, model.kappa
    tau_c = model.t_cold_freq
    tau_h = units.temperature_to_frequency(model.t_hot)

    j = g * kappa * omega * (model.n_res - n)
    work = max(-float(j[0]), 0.0)
    j_hot = float(np.sum(j[1:])) + max(float(j[0]), 0.0)
    j_cold = float(np.sum(j))
    work_strict = -float(np.sum(np.minimum(j, 0.0)))

    eta = work / j_hot if j_hot > 0 else 0.0
    eta_carnot = 1.0 - tau_c / tau_h
    sigma_bath = j_cold / tau_c - j_hot / tau_h
    return ThermoReport(
        scenario="external", t_cold=units.frequency_to_temperature(tau_c),
        t_hot=model.t_hot, j_hot=j_hot, j_cold=j_cold, work=work,
        l_incoherent=0.0, eta=eta, eta_carnot=eta_carnot,
        sigma=sigma_bath, sigma_bath=sigma_bath, sigma_radiation=0.0,
        work_strict=work_strict,
    )


def entropy_production(report: ThermoReport,
                       units: UnitSystem = DEFAULT_UNITS) -> float:
    """Bath-side entropy production rate J_cold/T_c - J_hot/T_h (1/ns);
    the work stream carries no entropy."""
    if not report.t_cold > 0:
        raise ValueError("t_cold must be positive")
    if report.t_hot is None:
        if report.j_hot == 0.0 and report.j_cold == 0.0:
            return 0.0
        raise ValueError("t_hot must be positive for nonzero currents")
    if not report.t_hot > 0:
        raise ValueError("t_hot must be positive")
    tau_c = units.temperature_to_frequency(report.t_cold)
    tau_h = units.temperature_to_frequency(report.t_hot)
    return report.j_cold / tau_c - report.j_hot / tau_h
