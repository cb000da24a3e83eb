import math

import numpy as np
import pytest

from dampedqho import (BathSpectrum, DampedOscillator, GaussianState, OscillatorParams,
                       PreparationSpec, QuenchSpec, TimeGrid)
from dampedqho.errors import GridError, MaskedTimeError
from dampedqho.gaussian_algebra import position_filter
from dampedqho.master import (exact_coefficients, gaussian_scenario_coefficients,
                              moment_flow, moment_flow_at, position_prep_coefficients,
                              weak_coupling_at, weak_coupling_coefficients)
from dampedqho.propagator import spectral_quadrature
from dampedqho.scenarios import (correlated_prep_engine, evolve_correlated_prep,
                                 evolve_factorized, evolve_quench)

import oracles

# time-domain nested quadrature (tests/oracles.py), η=0.01, k=1, Λ=10, T=0, t=5
WEAK_DP_T5 = 0.005064642917567118
WEAK_GAMMA_T5 = 0.00990049833749168


@pytest.fixture(scope="module")
def weak_model(unit_osc):
    return DampedOscillator(BathSpectrum(eta=0.01), unit_osc, TimeGrid.from_tmax(0.01, 10.0))


def _scaled_dev(exact, weak, mask):
    return np.max(np.abs(exact[mask] - weak[mask])) / np.max(np.abs(exact[mask]))


def d4(y, dt):
    return (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * dt)


class TestExactCoefficients:
    def test_initial_values(self, model):
        assert model.exact.d_x[0] == 0 and model.exact.d_p[0] == 0

    def test_lossless(self, free_model):
        assert np.all(free_model.exact.d_x == 0) and np.all(free_model.exact.d_p == 0)

    def test_grid_mismatch(self, model, short_model):
        with pytest.raises(GridError):
            exact_coefficients(model.local, short_model.noise)

    def test_weak_limit_at_t5(self, weak_model):
        i = weak_model.grid.index(5.0)
        ex, wk = weak_model.exact.d_p[i], weak_model.weak.d_p[i]
        assert abs(ex - wk) / abs(wk) <= 0.05

    def test_finite_on_mask(self, model):
        ex = model.exact
        for arr in (ex.gamma, ex.kappa, ex.d_x, ex.d_p):
            assert np.all(np.isfinite(arr[ex.valid]))


class TestWeakCoupling:
    def test_initial_values(self, weak_model):
        w = weak_model.weak
        assert w.gamma[0] == 0 and w.d_p[0] == 0
        # the bare spring constant is shifted by μ(0), matching the exact K(0)
        assert w.kappa[0] == pytest.approx(1.0 + 0.01 * 10 / math.sqrt(math.pi), rel=1e-14)
        assert w.kappa[0] == pytest.approx(weak_model.exact.kappa[0], rel=1e-10)

    def test_against_time_domain_oracle(self, weak_model):
        i = weak_model.grid.index(5.0)
        assert weak_model.weak.d_p[i] == pytest.approx(WEAK_DP_T5, rel=1e-8)
        assert weak_model.weak.gamma[i] == pytest.approx(WEAK_GAMMA_T5, rel=1e-8)

    def test_frozen_values_reproduced_by_oracle(self):
        assert oracles.weak_gamma_time_domain(5.0, 0.01, 10.0, 1.0) == pytest.approx(
            WEAK_GAMMA_T5, rel=1e-10)

    def test_damping_plateau_positive(self, unit_osc):
        b = BathSpectrum(eta=0.1)
        quad = spectral_quadrature(b, unit_osc, 30.0)
        g = weak_coupling_at(b, unit_osc, np.array([20.0, 25.0, 30.0]), quad)["gamma"]
        assert np.all(g > 0)
        assert np.ptp(g) < 0.1 * g.mean()

    def test_diffusion_grows_from_zero(self, weak_model):
        dp = weak_model.weak.d_p
        assert dp[0] == 0 and np.all(np.diff(dp[:11]) > 0)

    def test_arbitrary_times_match_table(self, weak_model):
        quad = weak_model.quad
        vals = weak_coupling_at(weak_model.bath, weak_model.osc, np.array([2.5]), quad)
        i = weak_model.grid.index(2.5)
        assert vals["d_x"][0] == pytest.approx(weak_model.weak.d_x[i], rel=1e-14)

    def test_agreement_at_small_coupling(self, weak_model):
        ex, wk = weak_model.exact, weak_model.weak
        t = weak_model.grid.times
        mask = (t >= 1) & (t <= 10) & ex.valid
        for name in ("gamma", "kappa", "d_x", "d_p"):
            assert _scaled_dev(getattr(ex, name), getattr(wk, name), mask) <= 0.05, name

    def test_disagreement_at_intermediate_coupling(self, short_model):
        ex, wk = short_model.exact, short_model.weak
        t = short_model.grid.times
        mask = (t >= 1) & (t <= 10) & ex.valid
        devs = [_scaled_dev(getattr(ex, n), getattr(wk, n), mask)
                for n in ("gamma", "kappa", "d_x", "d_p")]
        assert max(devs) > 0.10


class TestPositionPrep:
    def test_product_structure(self, model):
        pc = position_prep_coefficients(model.propagator, model.correlation)
        v = pc.valid
        assert np.allclose(pc.d2[v], pc.gamma1[v] * model.correlation.p2)

    def test_boundary(self, model):
        pc = position_prep_coefficients(model.propagator, model.correlation)
        assert abs(pc.gamma1[1]) < 0.05
        assert abs(pc.d1[0]) < 1e-10
        # direct formula at t = Δt
        G, Gd, Gdd = model.propagator.values[1, :3]
        S, Sd, Sdd = model.correlation.values[1, :3]
        g2 = (Gdd * Sd - Gd * Sdd) / (Gd * S - G * Sd)
        assert pc.d1[1] == pytest.approx(g2 * model.correlation.x2 - model.correlation.p2)

    def test_lossless_reduces_to_free_oscillator(self, free_model):
        pc = position_prep_coefficients(free_model.propagator, free_model.correlation)
        assert np.allclose(pc.gamma1, 0, atol=1e-12)
        assert np.allclose(pc.gamma2, 1, atol=1e-12)
        assert np.allclose(pc.d1, 0, atol=1e-12) and np.allclose(pc.d2, 0, atol=1e-12)

    @pytest.mark.parametrize("t", [0.3, 1.0, 4.0])
    def test_generates_position_prepared_dynamics(self, model, t):
        # states prepared by f(x) obey the coefficient set; moments from the general engine
        pc = position_prep_coefficients(model.propagator, model.correlation)
        rep = position_filter(0.2, x0=0.7)
        dt = model.grid.dt
        times = [t + k * dt for k in (-2, -1, 0, 1, 2)]
        m = correlated_prep_engine(rep, model.covariance, times)
        m = {k: np.real(v) for k, v in m.items() if k != "log_norm"}
        d = {k: d4(v, dt)[0] for k, v in m.items()}
        c = {k: v[2] for k, v in m.items()}
        i = model.grid.index(t)
        g1, g2, d1, d2 = pc.gamma1[i], pc.gamma2[i], pc.d1[i], pc.d2[i]
        assert d["mean_x"] == pytest.approx(c["mean_p"], abs=1e-6)
        assert d["mean_p"] == pytest.approx(-g1 * c["mean_p"] - g2 * c["mean_x"], abs=1e-6)
        assert d["var_x"] == pytest.approx(2 * c["cov_xp"], abs=1e-6)
        assert d["cov_xp"] == pytest.approx(
            c["var_p"] - g1 * c["cov_xp"] - g2 * c["var_x"] + d1, abs=1e-6)
        assert d["var_p"] == pytest.approx(
            -2 * g1 * c["var_p"] - 2 * g2 * c["cov_xp"] + 2 * d2, abs=1e-6)


class TestMomentFlow:
    def test_free_streaming(self):
        s = GaussianState(0.3, 0.2, 1.0, 0.4, 2.0)
        flow = moment_flow(s, 0.0, 0.0, 0.0, 0.0)
        assert flow[0] == 0.2 and flow[2] == 0.8

    def test_lossless_conserves_determinant(self, free_model):
        s = GaussianState(0.0, 0.0, 0.8, 0.3, 1.2)
        _, _, dsx, dsxp, dsp = moment_flow(s, 0.0, 1.0, 0.0, 0.0)
        ddet = dsx * s.var_p + s.var_x * dsp - 2 * s.cov_xp * dsxp
        assert ddet == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("init", [GaussianState(1.0, 0.3, 0.05, 0.0, 5.0),
                                      GaussianState(0.5, -0.2, 1.0, 0.3, 0.7)])
    def test_factorized_trajectories_satisfy_flow(self, model, init):
        tr = evolve_factorized(init, model.propagator, model.noise)
        ex = model.exact
        flow = moment_flow(tr, ex.gamma, ex.kappa, ex.d_x, ex.d_p)
        for name, f in zip(("mean_x", "mean_p", "var_x", "cov_xp", "var_p"), flow):
            y = getattr(tr, name)
            res = np.abs(d4(y, model.grid.dt) - f[2:-2]) / np.max(np.abs(y))
            assert res.max() <= 1e-3, name

    def test_masked_time_rejected(self, unit_osc):
        m = DampedOscillator(BathSpectrum(eta=2.0), unit_osc, TimeGrid.from_tmax(0.01, 30.0))
        t_bad = m.local.singular_times[0][0]
        s = GaussianState()
        with pytest.raises(MaskedTimeError):
            moment_flow_at(s, m.exact, t_bad)
        moment_flow_at(s, m.exact, 1.0)


class TestScenarioInversion:
    def test_factorized_has_no_drift(self, model):
        tr = evolve_factorized(GaussianState(1.0, 0.0, 0.05, 0.0, 5.0), model.propagator,
                               model.noise)
        co = gaussian_scenario_coefficients(tr, model.local)
        assert np.max(np.abs(co.drift)) < 1e-10
        assert np.allclose(co.d_x, model.exact.d_x, atol=1e-10)
        assert np.allclose(co.d_p, model.exact.d_p, atol=1e-10)

    def test_correlated_prep_has_drift(self, model):
        tr = evolve_correlated_prep(PreparationSpec(1.0, 10.0), model.propagator,
                                    model.correlation)
        co = gaussian_scenario_coefficients(tr, model.local)
        assert np.max(np.abs(co.drift)) > 0.1
        centred = evolve_correlated_prep(PreparationSpec(0.0, 10.0), model.propagator,
                                         model.correlation)
        co0 = gaussian_scenario_coefficients(centred, model.local)
        assert np.max(np.abs(co0.drift)) < 1e-12

    def test_stationary_gibbs_marginal(self, model):
        # σ̇ = 0 and σ_xp = 0 leave ⟨𝓕⟩ = 0, D_x = K<x²> - <p²>, D_p = Γ<p²>
        tr = evolve_quench(QuenchSpec(1.0, 1.0), model.bath, model.grid)
        co = gaussian_scenario_coefficients(tr, model.local)
        x2, p2 = model.correlation.x2, model.correlation.p2
        v = co.valid
        assert np.max(np.abs(co.drift[v])) <= 1e-6
        assert np.allclose(co.d_x[v], (model.local.kappa * x2 - p2)[v], atol=1e-6)
        assert np.allclose(co.d_p[v], (model.local.gamma * p2)[v], atol=1e-6)
        # the factorized state relaxes to the same marginal, so its exact
        # coefficients approach the stationary ones
        assert co.d_x[-1] == pytest.approx(model.exact.d_x[-1], abs=1e-6)
        assert co.d_p[-1] == pytest.approx(model.exact.d_p[-1], abs=1e-6)
