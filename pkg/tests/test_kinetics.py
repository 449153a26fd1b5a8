import math

import numpy as np
import pytest

from photon_engine import (AbsorptionProfile, DegenerateModelError, DyeModel,
                           ModeLadder, PumpScenario, RunawayInversionError,
                           ScenarioConfig, SystemState, bose_occupation,
                           build_model, dye_chemical_potential, evolve,
                           fit_distribution, model_at_t_hot, rhs,
                           solve_dye_only, solve_steady_state,
                           steady_state_to_csv, temperature_to_frequency)


def dye_config(kappa=1e-3, gamma_up=0.01, gamma_down=0.25, m_max=100,
               n_molecules=1e9, gamma0=1.0):
    return ScenarioConfig(
        ladder=ModeLadder(omega0=3400.0, epsilon=0.25, m_max=m_max),
        dye=DyeModel(n_molecules=n_molecules, omega_d=3500.0, t_cold=300.0,
                     absorption=AbsorptionProfile.flat(gamma0),
                     gamma_up=gamma_up, gamma_down=gamma_down),
        pump=PumpScenario(kind="dye", kappa=kappa),
    )


def external_config(t_hot=9000.0, kappa=1e-3, m_max=100, two_level=None,
                    n_molecules=1e9, gamma0=1.0):
    return ScenarioConfig(
        ladder=ModeLadder(omega0=3400.0, epsilon=0.25, m_max=m_max),
        dye=DyeModel(n_molecules=n_molecules, omega_d=3500.0, t_cold=300.0,
                     absorption=AbsorptionProfile.flat(gamma0)),
        pump=PumpScenario(kind="external", kappa=kappa, t_hot=t_hot,
                          two_level=two_level),
    )


# explicit integration needs a mild rate scale; the steady-state solver has
# no such restriction
def light_external(t_hot=8000.0, kappa=1.0, m_max=20):
    return external_config(t_hot=t_hot, kappa=kappa, m_max=m_max,
                           n_molecules=1e3, gamma0=0.01)


class TestBuildModel:
    def test_dye_model(self):
        m = build_model(dye_config())
        assert m.scenario == "dye"
        assert np.all(m.n_res == 0.0)
        assert m.gamma_up == 0.01 and m.gamma_down == 0.25

    def test_external_model(self):
        cfg = external_config(t_hot=6000.0)
        m = build_model(cfg)
        assert m.scenario == "external"
        assert m.gamma_up == 0.0 and m.gamma_down == 0.0
        tau = temperature_to_frequency(6000.0)
        np.testing.assert_allclose(m.n_res, bose_occupation(m.omega, tau),
                                   rtol=1e-14)

    def test_two_level_reduction(self):
        m = build_model(external_config(two_level=(3500.0, 1e5)))
        assert m.n_modes == 2
        np.testing.assert_allclose(m.omega, [3400.0, 3500.0])

    def test_model_at_t_hot_dye(self):
        cfg = dye_config()
        m = model_at_t_hot(cfg, 12000.0)
        tau = temperature_to_frequency(12000.0)
        assert m.gamma_up == pytest.approx(0.25 * math.exp(-3500.0 / tau), rel=1e-13)
        assert m.t_hot == 12000.0


class TestRhs:
    def test_particle_conservation_identity(self):
        # dye exchange moves one particle between photons and molecules
        cfg = dye_config(kappa=0.0, gamma_up=0.0, gamma_down=0.0, m_max=20,
                         n_molecules=500.0)
        m = build_model(cfg)
        rng = np.random.default_rng(7)
        n = rng.uniform(0.0, 3.0, m.n_modes)
        ndot, pedot = rhs(n, 0.3, m)
        total = float(np.sum(m.g * ndot)) + m.n_molecules * pedot
        scale = float(np.sum(m.g * np.abs(ndot))) + m.n_molecules * abs(pedot)
        assert abs(total) < 1e-12 * scale

    def test_detailed_balance_fixed_point(self):
        # Bose occupations at (T_c, mu(p_e)) null the dye exchange exactly
        cfg = dye_config(kappa=0.0, gamma_up=0.0, gamma_down=0.0, m_max=50,
                         n_molecules=100.0)
        m = build_model(cfg)
        p_e = 1e-4
        mu = dye_chemical_potential(p_e, cfg.dye)
        n = bose_occupation(m.omega, m.t_cold_freq, mu=mu)
        ndot, pedot = rhs(n, p_e, m)
        gross = m.n_molecules * m.gamma_abs * n * (1.0 - p_e)
        assert np.max(np.abs(ndot) / gross) < 1e-12
        assert abs(pedot) < 1e-12 * m.n_molecules


class TestSteadyState:
    def test_vacuum_without_pumping(self):
        s = solve_steady_state(build_model(dye_config(gamma_up=0.0)))
        assert s.n_photon == 0.0
        assert s.p_e == 0.0
        assert s.converged

    def test_runaway_detected(self):
        # strong pump with no photon loss: gain cannot be balanced
        cfg = dye_config(kappa=0.0, gamma_up=10.0, gamma_down=0.01)
        with pytest.raises(RunawayInversionError):
            solve_steady_state(build_model(cfg))

    def test_closed_system_rejected(self):
        cfg = dye_config(kappa=0.0, gamma_up=0.0, gamma_down=0.0)
        with pytest.raises(DegenerateModelError):
            solve_steady_state(build_model(cfg))

    def test_residuals_small(self):
        cfg = dye_config()
        s = solve_steady_state(build_model(cfg), cfg.solver)
        assert s.converged
        assert s.residual_rel < 1e-12

    def test_external_flux_balance(self):
        cfg = external_config(t_hot=9000.0)
        s = solve_steady_state(build_model(cfg), cfg.solver)
        lhs = float(np.sum(s.g * s.n))
        rhs_ = float(np.sum(s.g * s.n_res))
        assert lhs == pytest.approx(rhs_, rel=1e-10)

    def test_occupations_thermal_below_threshold(self):
        cfg = external_config(t_hot=9000.0)
        s = solve_steady_state(build_model(cfg), cfg.solver)
        assert s.condensate_fraction < 0.01
        t_fit, mu_fit = fit_distribution(s)
        # photons thermalize near the solvent temperature
        assert t_fit == pytest.approx(temperature_to_frequency(300.0), rel=0.05)
        assert mu_fit < s.omega[0]

    def test_condensation_above_threshold(self):
        cfg = external_config(t_hot=13000.0, m_max=800)
        s = solve_steady_state(build_model(cfg), cfg.solver)
        assert s.condensate_fraction > 0.05
        assert s.mu_fit == pytest.approx(s.omega[0], abs=0.5)


class TestSolveDyeOnly:
    def test_matches_bose_distribution(self):
        cfg = dye_config(kappa=0.0, gamma_up=0.0, gamma_down=0.0, m_max=200)
        m = build_model(cfg)
        s = solve_dye_only(m, n_photon=1000.0)
        assert float(np.sum(s.g * s.n)) == pytest.approx(1000.0, rel=1e-12)
        mu = dye_chemical_potential(s.p_e, cfg.dye)
        expected = bose_occupation(m.omega, m.t_cold_freq, mu=mu)
        np.testing.assert_allclose(s.n, expected, rtol=1e-10)

    def test_requires_closed_model(self):
        with pytest.raises(ValueError):
            solve_dye_only(build_model(dye_config()), n_photon=10.0)


class TestEvolve:
    def test_linear_relaxation_matches_analytic(self):
        # negligible dye: each mode relaxes to n_res at rate kappa
        cfg = ScenarioConfig(
            ladder=ModeLadder(omega0=3400.0, epsilon=0.25, m_max=3),
            dye=DyeModel(n_molecules=1.0, omega_d=3500.0, t_cold=300.0,
                         absorption=AbsorptionProfile.flat(1e-12)),
            pump=PumpScenario(kind="external", kappa=0.1, t_hot=8000.0),
        )
        m = build_model(cfg)
        n0 = np.array([5.0, 0.0, 1.0, 2.0])
        tr = evolve(SystemState(n=n0, p_e=0.0), m, t_end=12.0, rtol=1e-11,
                    atol=1e-13, record=False)
        expected = m.n_res + (n0 - m.n_res) * math.exp(-0.1 * 12.0)
        np.testing.assert_allclose(tr.final.n, expected, rtol=1e-8)

    def test_reaches_steady_state(self):
        cfg = light_external()
        m = build_model(cfg)
        s = solve_steady_state(m, cfg.solver)
        tr = evolve(SystemState(n=np.zeros(m.n_modes), p_e=0.0), m,
                    t_end=40.0, rtol=1e-10, atol=1e-14, record=False)
        np.testing.assert_allclose(tr.final.n, s.n, rtol=1e-7)

    def test_bounds_respected(self):
        cfg = light_external(m_max=10)
        m = build_model(cfg)
        tr = evolve(SystemState(n=np.zeros(m.n_modes), p_e=1.0), m, t_end=5.0)
        assert np.all(tr.n >= 0.0)
        assert np.all((tr.p_e >= 0.0) & (tr.p_e <= 1.0))

    def test_records_monotone_time(self):
        cfg = light_external(m_max=5)
        tr = evolve(SystemState(n=np.zeros(6), p_e=0.0), build_model(cfg),
                    t_end=2.0)
        assert tr.t[0] == 0.0 and tr.t[-1] == pytest.approx(2.0)
        assert np.all(np.diff(tr.t) > 0)

    def test_invalid_t_end(self):
        cfg = external_config(m_max=5)
        with pytest.raises(ValueError):
            evolve(SystemState(n=np.zeros(6), p_e=0.0), build_model(cfg), 0.0)


def test_steady_state_csv(tmp_path):
    cfg = external_config(t_hot=9000.0, m_max=20)
    s = solve_steady_state(build_model(cfg), cfg.solver)
    path = tmp_path / "steady.csv"
    steady_state_to_csv(s, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#") and "N_ph=" in lines[0]
    assert lines[1] == "m,g_m,omega_m,n_m,n_m_h"
    assert len(lines) == 2 + s.n.size
    row = lines[2].split(",")
    assert float(row[3]) == pytest.approx(s.n[0], rel=1e-15)
