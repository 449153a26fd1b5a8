"""Kinetic simulator for photon gases in dye-filled microcavities.

Rate equations for mode occupations coupled to the dye excitation, exact
steady states, condensation thresholds (analytic, continuum and numeric) and
heat-engine bookkeeping for both dye-pumped and thermally pumped cavities.
"""

__version__ = "0.1.0"

from .config import (AbsorptionProfile, ConfigError, DyeModel, ModeLadder,
                     PumpScenario, ScenarioConfig, SolverSettings, config_hash,
                     load_config, save_config)
from .kinetics import (DegenerateModelError, IntegrationError, KineticModel,
                       RunawayInversionError, SteadyState, SteadyStateError,
                       SystemState, Trajectory, build_model, evolve,
                       fit_distribution, model_at_t_hot, rhs, solve_dye_only,
                       solve_steady_state, steady_state_to_csv)
from .rates import (EffectiveTemperature, RateTable, bose_occupation,
                    build_rate_table, dye_chemical_potential,
                    effective_temperature)
from .sweeps import (RunManifest, SweepSpec, run_currents_scan,
                     run_phase_diagram, run_pump_sweep)
from .thermo import (ThermoReport, currents_dye_pumped, currents_external,
                     entropy_production)
from .thresholds import (ThresholdResult, bose_integral, continuum_threshold,
                         critical_number, discrete_critical_number,
                         harmonic_dos, mean_hot_energy, numeric_threshold,
                         reversible_dye_threshold, two_level_threshold)
from .units import (DEFAULT_UNITS, KB_OVER_HBAR_TRAD_PER_K, UnitSystem,
                    frequency_to_temperature, temperature_to_frequency)

__all__ = [
    "__version__",
    "AbsorptionProfile", "ConfigError", "DyeModel", "ModeLadder",
    "PumpScenario", "ScenarioConfig", "SolverSettings", "config_hash",
    "load_config", "save_config",
    "DegenerateModelError", "IntegrationError", "KineticModel",
    "RunawayInversionError", "SteadyState", "SteadyStateError", "SystemState",
    "Trajectory", "build_model", "evolve", "fit_distribution",
    "model_at_t_hot", "rhs", "solve_dye_only", "solve_steady_state",
    "steady_state_to_csv",
    "EffectiveTemperature", "RateTable", "bose_occupation", "build_rate_table",
    "dye_chemical_potential", "effective_temperature",
    "RunManifest", "SweepSpec", "run_currents_scan", "run_phase_diagram",
    "run_pump_sweep",
    "ThermoReport", "currents_dye_pumped", "currents_external",
    "entropy_production",
    "ThresholdResult", "bose_integral", "continuum_threshold",
    "critical_number", "discrete_critical_number", "harmonic_dos",
    "mean_hot_energy", "numeric_threshold", "reversible_dye_threshold",
    "two_level_threshold",
    "DEFAULT_UNITS", "KB_OVER_HBAR_TRAD_PER_K", "UnitSystem",
    "frequency_to_temperature", "temperature_to_frequency",
]
