"""Retarded Green function of the damped oscillator and the time-local
coefficients ``Γ(t)``, ``K(t)`` derived from it.

``G(t) = (2/π) ∫_0^∞ α''(ω) sin(ωt) dω``; derivatives are taken under the
integral sign, giving ω-power weights with alternating sin/cos factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import BathSpectrum, OscillatorParams
from .errors import ConvergenceError, GridError
from .numerics import QuadratureSpec, TimeGrid, fourier_table, omega_quadrature

__all__ = [
    "PropagatorTable",
    "LocalCoefficients",
    "WRONSKIAN_THRESHOLD",
    "spectral_quadrature",
    "build_propagator",
    "local_coefficients",
    "volterra_green",
]

WRONSKIAN_THRESHOLD = 1e-8


def spectral_quadrature(bath, oscillators, t_max, spec=None, thermal=True):
    """Frequency rule shared by every kernel built from ``bath``.

    The probes cover ``α''`` and ``ω³α''`` for each oscillator, the thermal
    integrand ``α'' coth(ω/2T)`` and the noise spectrum, so one node set
    serves Green functions, correlations and noise moments alike.
    """
    if isinstance(oscillators, OscillatorParams):
        oscillators = [oscillators]
    probes = []
    for osc in oscillators:
        probes.append(lambda w, o=osc: bath.susceptibility_imag(w, o))
        probes.append(lambda w, o=osc: w ** 3 * bath.susceptibility_imag(w, o))
        if thermal:
            probes.append(lambda w, o=osc: bath.susceptibility_imag_over_omega(w, o)
                          * bath.omega_coth(w))
    if thermal:
        probes.append(bath.noise_spectrum)
    return omega_quadrature(probes, bath.cutoff_lambda, t_max, spec,
                            name="spectral kernel")


@dataclass(frozen=True)
class PropagatorTable:
    """``G`` and its first three derivatives on a uniform grid.

    ``values[:, n]`` holds the n-th derivative. ``singular_times`` lists
    ``(t_start, t_end)`` runs of grid points where ``|W| < threshold``.
    """

    grid: TimeGrid
    values: np.ndarray
    wronskian: np.ndarray
    singular_times: tuple
    spring_k: float

    @property
    def G(self):
        return self.values[:, 0]

    @property
    def Gd(self):
        return self.values[:, 1]

    @property
    def Gdd(self):
        return self.values[:, 2]

    @property
    def Gddd(self):
        return self.values[:, 3]

    @property
    def times(self):
        return self.grid.times


@dataclass(frozen=True)
class LocalCoefficients:
    """Friction ``Γ(t)`` and spring ``K(t)`` of the time-local equation.

    Masked entries (``valid == False``) are NaN.
    """

    grid: TimeGrid
    gamma: np.ndarray
    kappa: np.ndarray
    valid: np.ndarray
    singular_times: tuple


def _singular_intervals(times, mask):
    out = []
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return ()
    start = prev = idx[0]
    for i in idx[1:]:
        if i != prev + 1:
            out.append((float(times[start]), float(times[prev])))
            start = i
        prev = i
    out.append((float(times[start]), float(times[prev])))
    return tuple(out)


def _free_green(omega0, t):
    w = omega0
    s, c = np.sin(w * t), np.cos(w * t)
    return np.column_stack([s / w, c, -w * s, -w * w * c])


def build_propagator(bath, osc, grid, spec=None, quad=None):
    """Tabulate ``G, Ġ, G̈, G⁽³⁾`` on ``grid``.

    Parameters
    ----------
    bath : BathSpectrum
    osc : OscillatorParams
    grid : TimeGrid
    spec : QuadratureSpec, optional
    quad : OmegaQuadrature, optional
        Pre-built frequency rule (from :func:`spectral_quadrature`).

    Returns
    -------
    PropagatorTable

    Notes
    -----
    At ``η = 0`` the spectral weight collapses onto ``ω = ±ω₀`` and the
    lossless result ``sin(ω₀t)/ω₀`` is used directly.
    """
    t = grid.times
    if bath.eta == 0:
        values = _free_green(osc.omega0, t)
    else:
        if quad is None:
            quad = spectral_quadrature(bath, osc, grid.t_max, spec, thermal=False)
        w = quad.nodes
        a2 = bath.susceptibility_imag(w, osc)
        scale = 2.0 / math.pi
        sin_part = fourier_table(quad, scale * np.column_stack([a2, -w ** 2 * a2]), t, "sin")
        cos_part = fourier_table(quad, scale * np.column_stack([w * a2, -w ** 3 * a2]), t, "cos")
        values = np.column_stack([sin_part[:, 0], cos_part[:, 0], sin_part[:, 1], cos_part[:, 1]])
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.all(np.isfinite(values), axis=1))[0])
            raise ConvergenceError("Green function", np.inf, time=float(t[bad]))
    G, Gd, Gdd = values[:, 0], values[:, 1], values[:, 2]
    wr = Gd * Gd - G * Gdd
    singular = _singular_intervals(t, np.abs(wr) < WRONSKIAN_THRESHOLD)
    values.setflags(write=False)
    wr.setflags(write=False)
    return PropagatorTable(grid, values, wr, singular, osc.spring_k)


def local_coefficients(prop, threshold=WRONSKIAN_THRESHOLD):
    """``Γ = (G G⁽³⁾ - Ġ G̈)/W`` and ``K = (G̈² - Ġ G⁽³⁾)/W`` with ``W = Ġ² - G G̈``.

    Grid points with ``|W| < threshold`` are masked.

    Raises
    ------
    ValueError
        If every grid point is singular.
    """
    G, Gd, Gdd, Gddd = prop.values.T
    W = prop.wronskian
    valid = np.abs(W) >= threshold
    if not np.any(valid):
        raise ValueError("wronskian vanishes on the whole grid; no local coefficients exist")
    safe = np.where(valid, W, 1.0)
    gamma = np.where(valid, (G * Gddd - Gd * Gdd) / safe, np.nan)
    kappa = np.where(valid, (Gdd * Gdd - Gd * Gddd) / safe, np.nan)
    return LocalCoefficients(prop.grid, gamma, kappa, valid,
                             _singular_intervals(prop.times, ~valid))


def _volterra_cn(bath, k, dt, n):
    mu = bath.memory_kernel(dt * np.arange(n))
    mu0 = mu[0]
    G = np.zeros(n)
    V = np.zeros(n)
    V[0] = 1.0
    acc = 0.0  # acceleration at the current step
    denom = 1.0 + 0.25 * dt * dt * (k + mu0)
    for i in range(n - 1):
        # trapezoidal convolution at t_{i+1}, minus the unknown V_{i+1} end term
        if i > 0:
            c_known = dt * (0.5 * mu[i + 1] * V[0] + np.dot(mu[i:0:-1], V[1:i + 1]))
        else:
            c_known = dt * 0.5 * mu[1] * V[0]
        rhs = V[i] + 0.5 * dt * (acc - k * G[i] - 0.5 * k * dt * V[i] - c_known)
        V[i + 1] = rhs / denom
        G[i + 1] = G[i] + 0.5 * dt * (V[i] + V[i + 1])
        acc = -k * G[i + 1] - c_known - 0.5 * dt * mu0 * V[i + 1]
    return G


def volterra_green(bath, osc, grid, richardson=True):
    """Solve ``G̈ + ∫_0^t μ(t-s) Ġ(s) ds + kG = 0`` by time stepping.

    Crank–Nicolson in time with a trapezoidal memory convolution, second
    order in ``dt``. With ``richardson`` the solve is repeated at ``dt/2``
    and the two are combined as ``(4 G_{dt/2} - G_dt)/3``. Intended as an
    independent check of the Fourier route.

    Returns
    -------
    ndarray
        ``G`` on ``grid``.
    """
    n = len(grid)
    coarse = _volterra_cn(bath, osc.spring_k, grid.dt, n)
    if not richardson:
        return coarse
    fine = _volterra_cn(bath, osc.spring_k, 0.5 * grid.dt, 2 * n - 1)[::2]
    return (4.0 * fine - coarse) / 3.0
