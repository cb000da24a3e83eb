import math

import numpy as np
import pytest

from dampedqho import BathSpectrum, DampedOscillator, OscillatorParams, TimeGrid
from dampedqho.propagator import build_propagator, local_coefficients, volterra_green

import oracles

# G, Ġ, G̈ at η=0.5, k=1, Λ=10 from scipy's QAWF Fourier quadrature (tests/oracles.py)
FROZEN_G = {
    0.5: (0.4425602985493282, 0.7053877791054832, -0.8399906695686984),
    1.0: (0.6864341965839812, 0.2677224330229295, -0.869909438915186),
    2.0: (0.5769307533242866, -0.4062024080993249, -0.39952611770129215),
    5.0: (-0.27688536580362516, 0.14773757888692396, 0.21654598821799503),
    10.0: (-0.039434214321314526, -0.05574193306630404, 0.07117868662038754),
}


def test_frozen_values_reproduced_by_oracle():
    for t, vals in list(FROZEN_G.items())[:2]:
        assert oracles.green(t) == pytest.approx(vals[0], abs=1e-12)


@pytest.mark.parametrize("t", sorted(FROZEN_G))
def test_against_oracle(model, t):
    i = model.grid.index(t)
    assert np.allclose(model.propagator.values[i, :3], FROZEN_G[t], atol=1e-8)


def test_boundary_identities(model):
    G, Gd, Gdd, G3 = model.propagator.values[0]
    assert abs(G) <= 1e-8
    assert abs(Gd - 1) <= 1e-8
    assert abs(Gdd) <= 1e-8
    assert G3 == pytest.approx(-1 - 0.5 * 10 / math.sqrt(math.pi), abs=1e-4)
    assert abs(model.propagator.wronskian[0] - 1) <= 1e-6


def test_third_derivative_matches_quadrature(model):
    assert model.propagator.Gddd[0] == pytest.approx(oracles.green(0.0, deriv=3), abs=1e-8)


def test_lossless_limit(free_model):
    t = free_model.grid.times
    assert np.max(np.abs(free_model.propagator.G - np.sin(t))) <= 1e-6


def test_damping(model):
    G = model.propagator.G
    assert abs(G[-1]) < np.max(G[:501])


def test_derivatives_consistent_with_finite_differences(model):
    v = model.propagator.values
    dt = model.grid.dt
    for n in range(3):
        fd = (v[2:, n] - v[:-2, n]) / (2 * dt)
        scale = np.max(np.abs(v[:, n + 1]))
        assert np.max(np.abs(fd - v[1:-1, n + 1])) / scale < 1e-3


class TestLocalCoefficients:
    def test_initial_values(self, model):
        # G(0)=G̈(0)=0, Ġ(0)=1 give Γ(0) = 0 and K(0) = -G⁽³⁾(0) = k + μ(0)
        loc = model.local
        assert loc.gamma[0] == pytest.approx(0.0, abs=1e-8)
        assert loc.kappa[0] == pytest.approx(1 + 5 / math.sqrt(math.pi), abs=1e-4)

    def test_jolt_relaxes_to_renormalized_spring(self, model):
        # once μ has decayed (t ≫ 1/Λ) K settles near k; it is not pinned to k at t→0⁺
        loc = model.local
        i = model.grid.index(1.0)
        assert abs(loc.kappa[i] - 1.0) < 0.2

    def test_lossless(self, free_model):
        loc = free_model.local
        assert np.allclose(loc.gamma[loc.valid], 0, atol=1e-12)
        assert np.allclose(loc.kappa[loc.valid], 1, atol=1e-12)

    def test_finite_on_mask(self, model):
        loc = model.local
        assert np.all(np.isfinite(loc.gamma[loc.valid]))
        assert np.all(np.isnan(loc.gamma[~loc.valid]))

    def test_strong_coupling_masks_decayed_tail(self):
        m = DampedOscillator(BathSpectrum(eta=2.0), OscillatorParams(1.0),
                             TimeGrid.from_tmax(0.01, 30.0))
        loc = m.local
        assert loc.singular_times, "W decays below threshold for η=2"
        assert not np.all(loc.valid) and np.all(np.isfinite(loc.gamma[loc.valid]))

    def test_grid_refinement_does_not_change_values(self, default_bath, unit_osc, model):
        fine = build_propagator(default_bath, unit_osc, TimeGrid.from_tmax(0.005, 30.0))
        lf = local_coefficients(fine)
        lc = model.local
        both = lc.valid & lf.valid[::2]
        assert np.max(np.abs(lf.gamma[::2][both] - lc.gamma[both])) <= 1e-4
        assert np.max(np.abs(lf.kappa[::2][both] - lc.kappa[both])) <= 1e-4

    def test_fully_singular_grid_rejected(self, model):
        from dataclasses import replace
        prop = replace(model.propagator, wronskian=np.zeros(len(model.grid)))
        with pytest.raises(ValueError):
            local_coefficients(prop)


class TestVolterra:
    def test_lossless(self, unit_osc):
        g = TimeGrid.from_tmax(0.01, 30.0)
        G = volterra_green(BathSpectrum(eta=0.0), unit_osc, g, richardson=False)
        assert np.max(np.abs(G - np.sin(g.times))) < 1e-3
        assert G[0] == 0

    def test_plain_scheme_second_order(self, unit_osc):
        b = BathSpectrum(eta=0.5)
        errs = []
        for dt in (0.02, 0.01):
            g = TimeGrid.from_tmax(dt, 10.0)
            ref = build_propagator(b, unit_osc, g).G
            errs.append(np.max(np.abs(volterra_green(b, unit_osc, g, richardson=False) - ref)))
        assert 3.0 < errs[0] / errs[1] < 5.0

    def test_matches_fourier(self, model, default_bath, unit_osc):
        G = volterra_green(default_bath, unit_osc, model.grid)
        assert np.max(np.abs(G - model.propagator.G)) <= 1e-4
