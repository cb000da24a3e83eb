"""Gibbs-state correlation kernels and driven-noise moments.

``S(t) = (1/π) ∫ α''(ω) coth(ω/2T) cos(ωt) dω`` is the symmetrized
position autocorrelation of the coupled equilibrium state,
``ν(t) = ∫ E_T(ω) cos(ωt) dω`` the symmetrized force correlation, and
``b_x = <X²>``, ``b_p = <Ẋ²>`` the variances of the noise-driven part of
the solution, ``X(t) = ∫_0^t G(t-s) F(s) ds``.

Second derivative of the noise moments
--------------------------------------
With ``I(ω, t) = ∫_0^t G(s) e^{iωs} ds`` we have ``∂_t I = G(t) e^{iωt}``
and therefore

    ḃ_x = 2 ∫ E_T Re[Ī G e^{iωt}] dω
    b̈_x = 2 ∫ E_T {G² + Re[Ī (Ġ + iωG) e^{iωt}]} dω

and the same with ``G → Ġ`` for ``b_p``. The inner integrals are
accumulated once per frequency node, so the whole table costs
``O(N_t · N_ω)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .numerics import cumulative_fourier, fourier_table, omega_quadrature
from .propagator import spectral_quadrature

__all__ = [
    "CorrelationTable",
    "NoiseMoments",
    "build_correlation",
    "force_correlation",
    "build_noise_moments",
    "spectral_moments",
    "cumulative_integral",
]


@dataclass(frozen=True)
class CorrelationTable:
    """``S`` and its first three derivatives, plus ``ν``, on a grid."""

    grid: object
    values: np.ndarray
    nu: np.ndarray
    temperature: float

    @property
    def S(self):
        return self.values[:, 0]

    @property
    def Sd(self):
        return self.values[:, 1]

    @property
    def Sdd(self):
        return self.values[:, 2]

    @property
    def Sddd(self):
        return self.values[:, 3]

    @property
    def x2(self):
        """Equilibrium ``<x²> = S(0)``."""
        return float(self.values[0, 0])

    @property
    def p2(self):
        """Equilibrium ``<p²> = -S̈(0)``."""
        return float(-self.values[0, 2])


@dataclass(frozen=True)
class NoiseMoments:
    """``b_x, ḃ_x, b̈_x, b_p, ḃ_p`` on a grid."""

    grid: object
    bx: np.ndarray
    bx_d: np.ndarray
    bx_dd: np.ndarray
    bp: np.ndarray
    bp_d: np.ndarray


def _thermal_weight(bath, osc, w):
    return bath.susceptibility_imag_over_omega(w, osc) * bath.omega_coth(w)


def build_correlation(bath, osc, grid, spec=None, quad=None):
    """Tabulate ``S, Ṡ, S̈, S⁽³⁾`` and ``ν`` on ``grid``.

    At ``T = 0`` the thermal factor is 1; for ``T > 0`` the integrand
    ``α'' coth`` is evaluated as ``(α''/ω)·ω coth(ω/2T)``, which stays
    finite at ``ω = 0``.
    """
    t = grid.times
    if bath.eta == 0:
        w0 = osc.omega0
        c = 1.0 if bath.temperature == 0 else 1.0 + 2.0 / math.expm1(w0 / bath.temperature)
        amp = c / (2 * w0)
        s, co = np.sin(w0 * t), np.cos(w0 * t)
        values = amp * np.column_stack([co, -w0 * s, -w0 ** 2 * co, w0 ** 3 * s])
        nu = np.zeros_like(t)
    else:
        if quad is None:
            quad = spectral_quadrature(bath, osc, grid.t_max, spec)
        w = quad.nodes
        a2c = _thermal_weight(bath, osc, w) / math.pi
        cos_part = fourier_table(quad, np.column_stack([a2c, -w ** 2 * a2c,
                                                        bath.noise_spectrum(w)]), t, "cos")
        sin_part = fourier_table(quad, np.column_stack([-w * a2c, w ** 3 * a2c]), t, "sin")
        values = np.column_stack([cos_part[:, 0], sin_part[:, 0], cos_part[:, 1], sin_part[:, 1]])
        nu = cos_part[:, 2]
    values.setflags(write=False)
    nu.setflags(write=False)
    return CorrelationTable(grid, values, nu, bath.temperature)


def force_correlation(bath, grid, spec=None, quad=None):
    """``ν(t) = ∫_0^∞ E_T(ω) cos(ωt) dω`` on ``grid`` (even in t)."""
    if bath.eta == 0:
        return np.zeros(len(grid))
    if quad is None:
        quad = omega_quadrature([bath.noise_spectrum], bath.cutoff_lambda, grid.t_max, spec,
                                name="force correlation")
    return fourier_table(quad, bath.noise_spectrum(quad.nodes), grid.times, "cos")


def spectral_moments(f, fd, dt, quad, weight, chunk=256):
    """``A = ∫ w |I|²``, ``Ȧ`` and ``Ä`` for ``I = ∫_0^t f(s) e^{iωs} ds``.

    Parameters
    ----------
    f, fd : ndarray
        The function and its derivative on the grid.
    dt : float
    quad : OmegaQuadrature
    weight : ndarray
        Spectral weight at the quadrature nodes (quadrature weights are
        applied here).

    Returns
    -------
    tuple of ndarray
        ``(A, Ȧ, Ä)``.
    """
    n = f.size
    t = dt * np.arange(n)
    wq = weight * quad.weights
    A = np.zeros(n)
    Ad = np.zeros(n)
    Add_cross = np.zeros(n)
    for start in range(0, quad.nodes.size, chunk):
        sl = slice(start, start + chunk)
        om = quad.nodes[sl]
        I = cumulative_fourier(f, fd, dt, om)
        phase = np.exp(1j * np.outer(om, t))
        Ic_phase = np.conj(I) * phase
        A += wq[sl] @ (I.real ** 2 + I.imag ** 2)
        Ad += wq[sl] @ Ic_phase.real
        # Re[Ī (f' + iωf) e^{iωt}] = f' Re[Ī e^{iωt}] - ω f Im[Ī e^{iωt}]
        Add_cross += (wq[sl] @ Ic_phase.real) * fd - ((wq[sl] * om) @ Ic_phase.imag) * f
    total = wq.sum()
    return A, 2 * f * Ad, 2 * (f * f * total + Add_cross)


def cumulative_integral(f, fd, dt):
    """``∫_0^t f`` on the grid using cubic Hermite interpolation of ``f``."""
    return cumulative_fourier(f, fd, dt, np.zeros(1))[0].real


def build_noise_moments(prop, bath, spec=None, quad=None, grid=None):
    """Driven-noise variances ``b_x``, ``b_p`` and derivatives on ``prop.grid``.

    Raises
    ------
    GridError
        If ``grid`` is given and differs from the propagator grid.
    """
    if grid is not None and grid != prop.grid:
        raise GridError("noise moments requested on a grid different from the propagator's")
    grid = prop.grid
    n = len(grid)
    if bath.eta == 0:
        z = np.zeros(n)
        return NoiseMoments(grid, z, z.copy(), z.copy(), z.copy(), z.copy())
    if quad is None:
        quad = omega_quadrature([bath.noise_spectrum], bath.cutoff_lambda, grid.t_max, spec,
                                name="noise moments")
    weight = bath.noise_spectrum(quad.nodes)
    G, Gd, Gdd, Gddd = prop.values.T
    bx, bx_d, bx_dd = spectral_moments(G, Gd, grid.dt, quad, weight)
    bp, bp_d, _ = spectral_moments(Gd, Gdd, grid.dt, quad, weight)
    # b_x(0) = b_p(0) = 0 exactly; the cumulative sums start from zero.
    return NoiseMoments(grid, bx, bx_d, bx_dd, bp, bp_d)


def check_same_grid(*tables):
    grids = [t.grid for t in tables]
    if any(g != grids[0] for g in grids[1:]):
        raise GridError("tables live on different grids")
    return grids[0]
