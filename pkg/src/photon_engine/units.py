"""Unit conventions.

All frequencies, energies and temperatures are handled internally in Trad/s
(10^12 rad/s), with hbar = k_B = 1.  Temperatures enter and leave the public
API in kelvin and are converted through k_B/hbar.
"""

from __future__ import annotations

from dataclasses import dataclass

# CODATA: k_B = 1.380649e-23 J/K (exact), hbar = 1.054571817e-34 J s.
KB_OVER_HBAR_TRAD_PER_K = 1.380649e-23 / 1.054571817e-34 / 1e12


@dataclass(frozen=True)
class UnitSystem:
    """Conversion factor between kelvin and the internal Trad/s scale."""

    boltzmann_over_hbar: float = KB_OVER_HBAR_TRAD_PER_K

    def __post_init__(self):
        if not self.boltzmann_over_hbar > 0:
            raise ValueError("boltzmann_over_hbar must be positive")

    def temperature_to_frequency(self, t_kelvin: float) -> float:
        """Kelvin -> Trad/s."""
        if t_kelvin < 0:
            raise ValueError(f"temperature must be >= 0 K, got {t_kelvin}")
        return t_kelvin * self.boltzmann_over_hbar

    def frequency_to_temperature(self, freq: float) -> float:
        """Trad/s -> kelvin."""
        return freq / self.boltzmann_over_hbar


DEFAULT_UNITS = UnitSystem()


def temperature_to_frequency(t_kelvin: float) -> float:
    """Kelvin -> Trad/s with the default unit system."""
    return DEFAULT_UNITS.temperature_to_frequency(t_kelvin)


def frequency_to_temperature(freq: float) -> float:
    """Trad/s -> kelvin with the default unit system."""
    return DEFAULT_UNITS.frequency_to_temperature(freq)
