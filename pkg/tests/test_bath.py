import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from dampedqho import BathSpectrum, OscillatorParams
from dampedqho.errors import PoleError

from oracles import eta_imag_hilbert, eta_imag_mpmath

BATH = BathSpectrum(eta=0.5, cutoff_lambda=10.0)
OSC = OscillatorParams(1.0)


class TestFrictionSpectrum:
    def test_zero_frequency(self):
        assert BATH.friction_spectrum(0.0) == pytest.approx(0.5 + 0j)

    def test_parity(self):
        w = np.array([0.3, 2.0, 17.0])
        a, b = BATH.friction_spectrum(w), BATH.friction_spectrum(-w)
        assert np.allclose(a.real, b.real) and np.allclose(a.imag, -b.imag)

    def test_value_at_cutoff(self):
        # 0.5 e^{-1} (1 + i erfi(1)); reference digits from mpmath
        val = BATH.friction_spectrum(10.0)
        assert val.real == pytest.approx(0.18393972058572117, rel=1e-12)
        assert val.imag == pytest.approx(0.303578852920697, rel=1e-12)

    @pytest.mark.parametrize("w", [1.0, 5.0, 10.0])
    def test_kramers_kronig(self, w):
        assert BATH.friction_imag(w) == pytest.approx(eta_imag_hilbert(w, 0.5, 10.0), abs=1e-6)

    @pytest.mark.parametrize("w", [0.01, 3.0, 25.0, 60.0])
    def test_imag_part_mpmath(self, w):
        assert BATH.friction_imag(w) == pytest.approx(eta_imag_mpmath(w, 0.5, 10.0), rel=1e-12)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            BATH.friction_spectrum(np.nan)


class TestMemoryKernel:
    def test_value_at_zero(self):
        assert BATH.memory_kernel(0.0) == pytest.approx(5 / math.sqrt(math.pi), rel=1e-14)

    def test_derivative_at_zero(self):
        assert BATH.memory_kernel(0.0, order=1) == 0.0

    def test_value_at_one(self):
        assert BATH.memory_kernel(1.0) == pytest.approx(2.8209479177387814 * math.exp(-25),
                                                       rel=1e-12)

    @pytest.mark.parametrize("t", [0.0, 0.1, 0.5])
    def test_cosine_transform(self, t):
        f = lambda w: 0.5 * math.exp(-(w / 10) ** 2)
        if t == 0:
            ref = 2 / math.pi * integrate.quad(f, 0, 100, epsabs=1e-13)[0]
        else:
            ref = 2 / math.pi * integrate.quad(f, 0, 100, weight="cos", wvar=t, epsabs=1e-13)[0]
        assert BATH.memory_kernel(t) == pytest.approx(ref, abs=1e-10)

    def test_derivative_matches_finite_difference(self):
        h = 1e-6
        fd = (BATH.memory_kernel(0.2 + h) - BATH.memory_kernel(0.2 - h)) / (2 * h)
        assert BATH.memory_kernel(0.2, order=1) == pytest.approx(fd, rel=1e-7)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            BATH.memory_kernel(-0.1)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            BATH.memory_kernel(0.1, order=2)


class TestSusceptibility:
    def test_static_limit(self):
        assert BATH.susceptibility(0.0, OscillatorParams(2.0)) == pytest.approx(0.5)

    def test_imag_part_consistent(self):
        w = np.linspace(0.1, 40, 50)
        assert np.allclose(BATH.susceptibility(w, OSC).imag, BATH.susceptibility_imag(w, OSC),
                           rtol=1e-12, atol=1e-15)

    def test_small_frequency_slope(self):
        osc = OscillatorParams(2.0)
        assert BATH.susceptibility_imag_over_omega(1e-6, osc) == pytest.approx(0.5 / 4, rel=1e-6)

    def test_lossless_is_real(self):
        free = BathSpectrum(eta=0.0)
        w = np.array([0.2, 0.7, 3.0])
        assert np.all(free.susceptibility_imag(w, OSC) == 0)

    def test_lossless_pole(self):
        with pytest.raises(PoleError):
            BathSpectrum(eta=0.0).susceptibility(1.0, OSC)


class TestNoiseSpectrum:
    def test_zero_temperature(self):
        w = np.array([0.5, 3.0, 12.0])
        assert np.allclose(BATH.noise_spectrum(w), BATH.friction_real(w) * w / math.pi)

    def test_classical_limit_at_zero_frequency(self):
        warm = BathSpectrum(eta=0.5, temperature=1.0)
        assert warm.noise_spectrum(np.array([0.0]))[0] == pytest.approx(1 / math.pi, rel=1e-12)

    def test_thermal_value(self):
        warm = BathSpectrum(eta=0.5, temperature=1.0)
        ref = 0.5 * math.exp(-0.04) * 2 / math.pi / math.tanh(1.0)
        assert warm.noise_spectrum(np.array([2.0]))[0] == pytest.approx(ref, rel=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=0.0, max_value=200.0), st.floats(min_value=0.0, max_value=50.0))
    def test_non_negative(self, w, T):
        b = BathSpectrum(eta=0.5, temperature=T)
        assert b.noise_spectrum(np.array([w]))[0] >= 0

    def test_coth_large_argument_stable(self):
        warm = BathSpectrum(temperature=0.01)
        assert warm.coth_factor(np.array([100.0]))[0] == 1.0


@pytest.mark.parametrize("kw", [dict(eta=-1.0), dict(cutoff_lambda=0.0), dict(temperature=-1.0),
                                dict(eta=math.inf)])
def test_invalid_bath(kw):
    with pytest.raises(ValueError):
        BathSpectrum(**kw)


def test_invalid_oscillator():
    with pytest.raises(ValueError):
        OscillatorParams(0.0)
