"""Bose occupations, detailed-balance emission/absorption rates, effective
temperatures and the thermalized-distribution chemical potential.

Emission rates are tied to absorption by the Kennard-Stepanov relation
Gamma_e(omega) = Gamma_a(omega) * exp(-(omega - omega_d)/T_c), with T_c in
frequency units.  The ratio is kept as a log internally so that large
detunings (|omega - omega_d|/T_c beyond the float exponent range) stay
representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DyeModel, ModeLadder
from .units import DEFAULT_UNITS, UnitSystem


def bose_occupation(omega, temperature, mu=0.0):
    """Bose-Einstein occupation 1/(exp((omega-mu)/T) - 1).

    omega, temperature and mu are all in frequency units (Trad/s).
    Requires omega > mu and temperature > 0.  Evaluated as
    exp(-x)/(1 - exp(-x)) so large x never overflows.
    """
    omega = np.asarray(omega, dtype=float)
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    x = (omega - mu) / temperature
    if np.any(x <= 0):
        raise ValueError("bose_occupation requires omega > mu")
    e = np.exp(-x)
    n = e / (-np.expm1(-x))
    return n if n.shape else float(n)


@dataclass(frozen=True)
class RateTable:
    """Per-mode emission/absorption rates (1/ns per molecule) on a ladder."""

    omega: np.ndarray
    g: np.ndarray
    gamma_abs: np.ndarray
    log_ratio: np.ndarray      # ln(Gamma_e/Gamma_a) = -(omega - omega_d)/T_c
    omega_d: float
    t_cold_freq: float
    provenance: str = "analytic"

    @property
    def gamma_em(self) -> np.ndarray:
        return self.gamma_abs * np.exp(self.log_ratio)


def build_rate_table(ladder: ModeLadder, dye: DyeModel,
                     units: UnitSystem = DEFAULT_UNITS) -> RateTable:
    """Sample the absorption profile on the ladder and set emission by
    detailed balance at the solvent temperature."""
    omega = ladder.frequencies
    gamma_abs = dye.absorption.rate(omega)
    if np.any(gamma_abs <= 0):
        raise ValueError("absorption profile must be strictly positive on the ladder")
    t_cold = units.temperature_to_frequency(dye.t_cold)
    log_ratio = -(omega - dye.omega_d) / t_cold
    return RateTable(
        omega=omega, g=ladder.g, gamma_abs=gamma_abs, log_ratio=log_ratio,
        omega_d=dye.omega_d, t_cold_freq=t_cold,
        provenance=dye.absorption.kind,
    )


@dataclass(frozen=True)
class EffectiveTemperature:
    """Temperature of a thermal reservoir reproducing a gain/loss ratio.

    value is in frequency units (Trad/s); inverted marks gain >= loss,
    where no finite positive temperature exists.
    """

    value: float
    inverted: bool

    def kelvin(self, units: UnitSystem = DEFAULT_UNITS) -> float:
        return units.frequency_to_temperature(self.value)


def effective_temperature(gain: float, loss: float, omega: float) -> EffectiveTemperature:
    """Solve gain/loss = exp(-omega/T_eff) for T_eff."""
    if not gain > 0 or not loss > 0:
        raise ValueError("gain and loss rates must be positive")
    if gain >= loss:
        return EffectiveTemperature(value=math.inf, inverted=True)
    return EffectiveTemperature(value=-omega / math.log(gain / loss), inverted=False)


def dye_chemical_potential(p_e: float, dye: DyeModel,
                           units: UnitSystem = DEFAULT_UNITS) -> float:
    """Chemical potential of the dye-thermalized photon distribution:
    mu = omega_d + T_c * ln(p_e / p_g), in Trad/s."""
    if not 0 < p_e < 1:
        raise ValueError(f"p_e must lie strictly in (0, 1), got {p_e}")
    t_cold = units.temperature_to_frequency(dye.t_cold)
    return dye.omega_d + t_cold * math.log(p_e / (1.0 - p_e))
