"""Discrete-bath normal-mode model used to validate the continuum kernels.

The bath is replaced by ``J`` oscillators at midpoint frequencies
``ω_j = (j - ½)Δω`` with ``m_j ω_j² = (2/π) η'(ω_j) Δω``, coupled through
``Σ m_j ω_j² (q_j - x)²/2``. In mass-weighted coordinates the potential
matrix is an arrowhead; its eigenvectors give everything in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError

__all__ = ["DiscreteBath", "NormalModes", "normal_modes", "finite_model_kernels",
           "gibbs_marginal"]


@dataclass(frozen=True)
class DiscreteBath:
    """``J`` bath modes on ``(0, omega_max]`` sampled from ``bath``."""

    bath: object
    n_modes: int = 4000
    omega_max: float = None

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be positive")
        if self.omega_max is None:
            object.__setattr__(self, "omega_max", 8.0 * self.bath.cutoff_lambda)

    @property
    def spacing(self):
        return self.omega_max / self.n_modes

    @property
    def recurrence_time(self):
        return 2 * math.pi / self.spacing

    @cached_property
    def frequencies(self):
        return (np.arange(1, self.n_modes + 1) - 0.5) * self.spacing

    @cached_property
    def couplings(self):
        """``c_j = m_j ω_j²``."""
        return (2 / math.pi) * self.bath.friction_real(self.frequencies) * self.spacing

    @property
    def masses(self):
        return self.couplings / self.frequencies ** 2


@dataclass(frozen=True)
class NormalModes:
    """Frequencies ``Ω_n`` and oscillator weights ``c_n²``."""

    omegas: np.ndarray
    weights: np.ndarray
    temperature: float

    def coth(self):
        if self.temperature == 0:
            return np.ones_like(self.omegas)
        return 1.0 / np.tanh(self.omegas / (2 * self.temperature))


def normal_modes(dbath, osc):
    """Diagonalize the ``(J+1)×(J+1)`` mass-weighted potential matrix.

    Raises
    ------
    ConfigError
        If the matrix is not positive definite.
    """
    w = dbath.frequencies
    c = dbath.couplings
    n = w.size + 1
    K = np.zeros((n, n))
    K[0, 0] = osc.spring_k + c.sum()
    K[0, 1:] = K[1:, 0] = -w * np.sqrt(c)
    K[np.arange(1, n), np.arange(1, n)] = w * w
    evals, vecs = np.linalg.eigh(K)
    if evals[0] <= 0:
        raise ConfigError(f"potential matrix not positive definite (λ_min = {evals[0]:.3g})")
    return NormalModes(np.sqrt(evals), vecs[0] ** 2, dbath.bath.temperature)


def finite_model_kernels(dbath, osc, grid, modes=None, chunk=256):
    """``G`` and ``S`` of the discrete model on ``grid``.

    Returns
    -------
    G, S : ndarray
    """
    if grid.t_max >= dbath.recurrence_time:
        raise ValueError("grid extends past the recurrence time of the discrete bath")
    if modes is None:
        modes = normal_modes(dbath, osc)
    om, wt = modes.omegas, modes.weights
    a_g = wt / om
    a_s = wt * modes.coth() / (2 * om)
    t = grid.times
    G = np.empty(t.size)
    S = np.empty(t.size)
    for i in range(0, t.size, chunk):
        ph = np.outer(t[i:i + chunk], om)
        G[i:i + chunk] = np.sin(ph) @ a_g
        S[i:i + chunk] = np.cos(ph) @ a_s
    return G, S


def gibbs_marginal(dbath, osc, modes=None):
    """``(<x²>, <p²>)`` of the coupled Gibbs state from mode sums."""
    if modes is None:
        modes = normal_modes(dbath, osc)
    om, wt, ct = modes.omegas, modes.weights, modes.coth()
    return float(np.sum(wt * ct / (2 * om))), float(np.sum(wt * om * ct / 2))
