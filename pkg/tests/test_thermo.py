import dataclasses
import math

import numpy as np
import pytest

from photon_engine import (AbsorptionProfile, DyeModel, ModeLadder,
                           PumpScenario, ScenarioConfig, build_model,
                           currents_dye_pumped, currents_external,
                           entropy_production, model_at_t_hot,
                           solve_steady_state, temperature_to_frequency)


def dye_config(kappa=1e-3):
    return ScenarioConfig(
        ladder=ModeLadder(omega0=3400.0, epsilon=0.25, m_max=400),
        dye=DyeModel(n_molecules=1e9, omega_d=3500.0, t_cold=300.0,
                     absorption=AbsorptionProfile.flat(1.0),
                     gamma_down=0.25, gamma_up=1e-3),
        pump=PumpScenario(kind="dye", kappa=kappa),
    )


def external_config(t_hot, two_level=None):
    return ScenarioConfig(
        ladder=ModeLadder(omega0=3400.0, epsilon=0.25, m_max=400),
        dye=DyeModel(n_molecules=1e9, omega_d=3500.0, t_cold=300.0),
        pump=PumpScenario(kind="external", kappa=1e-3, t_hot=t_hot,
                          two_level=two_level),
    )


def dye_report(t_hot):
    cfg = dye_config()
    model = model_at_t_hot(cfg, t_hot)
    steady = solve_steady_state(model, cfg.solver)
    return steady, currents_dye_pumped(steady, model)


def external_report(t_hot, two_level=None):
    cfg = external_config(t_hot, two_level)
    model = build_model(cfg)
    steady = solve_steady_state(model, cfg.solver)
    return steady, currents_external(steady, model)


class TestDyePumped:
    def test_energy_closure(self):
        for t_hot in (5000.0, 12000.0, 20000.0):
            _, rep = dye_report(t_hot)
            assert rep.j_hot == pytest.approx(
                rep.j_cold + rep.work + rep.l_incoherent, rel=1e-12)

    def test_eta_plateau_above_threshold(self):
        _, rep = dye_report(14000.0)
        assert rep.eta == pytest.approx(3400.0 / 3500.0, rel=1e-3)

    def test_eta_small_below_threshold(self):
        _, rep = dye_report(5000.0)
        assert rep.eta < 1e-3

    def test_eta_below_carnot(self):
        for t_hot in (5000.0, 12000.0, 20000.0):
            _, rep = dye_report(t_hot)
            assert rep.eta <= rep.eta_carnot + 1e-12

    def test_sigma_nonnegative(self):
        for t_hot in (4000.0, 8000.0, 10500.0, 12000.0, 20000.0):
            _, rep = dye_report(t_hot)
            assert rep.sigma >= -1e-12 * max(abs(rep.sigma_bath), rep.sigma_radiation)

    def test_sigma_bath_negative_below_threshold(self):
        # light radiated into empty modes carries the missing entropy
        _, rep = dye_report(5000.0)
        assert rep.sigma_bath < 0
        assert rep.sigma_radiation > 0
        assert rep.sigma >= 0

    def test_t_hot_inferred_from_pump_ratio(self):
        cfg = dye_config()
        tau_h = temperature_to_frequency(9000.0)
        dye = dataclasses.replace(cfg.dye,
                                  gamma_up=0.25 * math.exp(-3500.0 / tau_h))
        cfg = dataclasses.replace(cfg, dye=dye)
        model = build_model(cfg)
        steady = solve_steady_state(model, cfg.solver)
        rep = currents_dye_pumped(steady, model)
        assert rep.t_hot == pytest.approx(9000.0, rel=1e-12)

    def test_rejects_external_model(self):
        cfg = external_config(9000.0)
        model = build_model(cfg)
        steady = solve_steady_state(model, cfg.solver)
        with pytest.raises(ValueError):
            currents_dye_pumped(steady, model)


class TestExternal:
    def test_energy_closure(self):
        for t_hot in (6000.0, 10000.0, 14000.0):
            _, rep = external_report(t_hot)
            assert rep.j_hot == pytest.approx(rep.j_cold + rep.work, rel=1e-12)

    def test_sigma_nonnegative_and_eta_bounded(self):
        for t_hot in (6000.0, 10000.0, 13000.0, 20000.0):
            _, rep = external_report(t_hot)
            assert rep.sigma >= 0.0
            assert 0.0 <= rep.eta <= rep.eta_carnot + 1e-12

    def test_work_strict_bounds_condensate_work(self):
        _, rep = external_report(13000.0)
        assert rep.work_strict >= rep.work > 0

    def test_reversible_point_two_level(self):
        # at the analytic two-level threshold the engine is reversible
        _, rep = external_report(10500.0, two_level=(3500.0, 1e5))
        tau_c = temperature_to_frequency(300.0)
        scale = abs(rep.j_hot) / tau_c
        assert abs(rep.sigma) < 1e-6 * scale

    def test_equilibrium_zero_currents(self):
        # reservoir at the solvent temperature: no heat flows
        _, rep = external_report(300.0)
        scale = 1e-9 * temperature_to_frequency(300.0)
        assert abs(rep.j_hot) < scale and abs(rep.j_cold) < scale
        assert abs(entropy_production(rep)) < 1e-9

    def test_rejects_dye_model(self):
        cfg = dye_config()
        model = build_model(cfg)
        steady = solve_steady_state(model, cfg.solver)
        with pytest.raises(ValueError):
            currents_external(steady, model)


class TestEntropyProduction:
    def test_matches_bath_side_sigma(self):
        _, rep = external_report(13000.0)
        assert entropy_production(rep) == pytest.approx(rep.sigma_bath, rel=1e-12)

    def test_domain(self):
        _, rep = external_report(13000.0)
        bad = dataclasses.replace(rep, t_hot=-1.0)
        with pytest.raises(ValueError):
            entropy_production(bad)

    def test_unpumped_dye_report_is_zero(self):
        cfg = dye_config()
        dye = dataclasses.replace(cfg.dye, gamma_up=0.0)
        cfg = dataclasses.replace(cfg, dye=dye)
        model = build_model(cfg)
        steady = solve_steady_state(model, cfg.solver)
        rep = currents_dye_pumped(steady, model)
        assert rep.t_hot is None
        assert entropy_production(rep) == 0.0


def test_non_steady_input_rejected():
    cfg = external_config(9000.0)
    model = build_model(cfg)
    steady = solve_steady_state(model, cfg.solver)
    bad = dataclasses.replace(steady, n=steady.n * 1.5, residual_rel=1.0)
    with pytest.raises(ValueError):
        currents_external(bad, model)
