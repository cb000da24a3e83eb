"""Ohmic bath with exponential cutoff.

Units: ħ = k_B = m = 1. The friction spectrum is
``η(ω) = η e^{-ω²/Λ²} (1 + i erfi(ω/Λ))`` and the memory kernel its
cosine transform ``μ(t) = ηΛ e^{-Λ²t²/4} / √π``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .numerics import SQRT_PI, scaled_erfi

__all__ = ["BathSpectrum", "OscillatorParams"]


@dataclass(frozen=True)
class OscillatorParams:
    """Bare oscillator: unit mass, spring constant ``spring_k``."""

    spring_k: float = 1.0

    def __post_init__(self):
        if not (self.spring_k > 0 and math.isfinite(self.spring_k)):
            raise ValueError("spring_k must be positive")

    @property
    def omega0(self):
        return math.sqrt(self.spring_k)


@dataclass(frozen=True)
class BathSpectrum:
    """Ohmic bath ``η'(ω) = η exp(-ω²/Λ²)`` at temperature ``temperature``.

    Parameters
    ----------
    eta : float
        Coupling strength, ``η >= 0``.
    cutoff_lambda : float
        Cutoff frequency Λ.
    temperature : float
        Bath temperature, ``T >= 0``.
    """

    eta: float = 0.5
    cutoff_lambda: float = 10.0
    temperature: float = 0.0

    def __post_init__(self):
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise ValueError("eta must be non-negative")
        if not (self.cutoff_lambda > 0 and math.isfinite(self.cutoff_lambda)):
            raise ValueError("cutoff_lambda must be positive")
        if not (self.temperature >= 0 and math.isfinite(self.temperature)):
            raise ValueError("temperature must be non-negative")

    # -- friction spectrum ------------------------------------------------
    def friction_real(self, omega):
        omega = _finite(omega)
        return self.eta * np.exp(-(omega / self.cutoff_lambda) ** 2)

    def friction_imag(self, omega):
        # η'' = η e^{-x²} erfi(x), with the product taken through Dawson's function.
        omega = _finite(omega)
        return self.eta * scaled_erfi(omega / self.cutoff_lambda)

    def friction_spectrum(self, omega):
        """Complex ``η(ω) = η'(ω) + iη''(ω)``."""
        return self.friction_real(omega) + 1j * self.friction_imag(omega)

    # -- memory kernel ----------------------------------------------------
    def memory_kernel(self, t, order=0):
        """``μ(t)`` (order 0) or ``μ̇(t)`` (order 1) for ``t >= 0``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("memory kernel is defined for t >= 0 only")
        lam = self.cutoff_lambda
        mu = self.eta * lam / SQRT_PI * np.exp(-0.25 * lam * lam * t * t)
        if order == 0:
            return mu
        if order == 1:
            return -0.5 * lam * lam * t * mu
        raise ValueError("order must be 0 or 1")

    # -- thermal factors --------------------------------------------------
    def coth_factor(self, omega):
        """``coth(ω/2T)`` for ω > 0 as ``1 + 2/(e^{ω/T} - 1)``; 1 at T = 0."""
        omega = np.asarray(omega, dtype=float)
        if self.temperature == 0:
            return np.ones_like(omega)
        with np.errstate(divide="ignore", over="ignore"):
            return 1.0 + 2.0 / np.expm1(omega / self.temperature)

    def omega_coth(self, omega):
        """``ω coth(ω/2T)``, continuous at ω = 0 where it equals ``2T``."""
        omega = np.asarray(omega, dtype=float)
        if self.temperature == 0:
            return np.abs(omega)
        T = self.temperature
        out = np.empty_like(omega)
        small = np.abs(omega) < 1e-8 * T
        out[small] = 2 * T
        w = omega[~small]
        with np.errstate(over="ignore"):
            out[~small] = w * (1.0 + 2.0 / np.expm1(w / T))
        return out

    def noise_spectrum(self, omega):
        """``E_T(ω) = η'(ω) (ω/π) coth(ω/2T)`` for ω >= 0."""
        return self.friction_real(omega) * self.omega_coth(omega) / math.pi

    # -- response ---------------------------------------------------------
    def susceptibility(self, omega, osc):
        """``α(ω) = 1/(k - ω² - iωη(ω))``."""
        omega = _finite(omega)
        den = osc.spring_k - omega ** 2 - 1j * omega * self.friction_spectrum(omega)
        if np.any(den == 0):
            raise PoleError(f"susceptibility pole at ω = ±{osc.omega0:g} (lossless bath)")
        return 1.0 / den

    def susceptibility_imag(self, omega, osc):
        """``α''(ω) = ωη'/((k - ω² + ωη'')² + (ωη')²)``; zero where ``η = 0``."""
        omega = _finite(omega)
        ep = self.friction_real(omega)
        epp = self.friction_imag(omega)
        re = osc.spring_k - omega ** 2 + omega * epp
        im = omega * ep
        den = re * re + im * im
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(im == 0, 0.0, im / np.where(den == 0, 1.0, den))
        return out

    def susceptibility_imag_over_omega(self, omega, osc):
        """``α''(ω)/ω``, regular at ω = 0."""
        omega = _finite(omega)
        ep = self.friction_real(omega)
        epp = self.friction_imag(omega)
        re = osc.spring_k - omega ** 2 + omega * epp
        im = omega * ep
        return ep / (re * re + im * im)


def _finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite frequency")
    return x
