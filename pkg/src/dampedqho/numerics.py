"""Numerical kernels: imaginary error function, frequency quadrature on
[0, ∞), Fourier-weighted time integrals, and closed-form Gaussian integrals.

Frequency integrals in this package always carry the Gaussian cutoff
factor ``exp(-ω²/Λ²)``, so a composite Gauss–Legendre rule on
``[0, upper_cutoff·Λ]`` with panels no wider than an oscillation period is
enough; no Filon weights or sequence acceleration are needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import dawsn

from .errors import ConvergenceError, DivergentIntegralError, GridError

SQRT_PI = math.sqrt(math.pi)

__all__ = [
    "erfi",
    "scaled_erfi",
    "QuadratureSpec",
    "OmegaQuadrature",
    "omega_quadrature",
    "integrate_omega",
    "fourier_table",
    "cumulative_fourier",
    "TimeGrid",
    "SymmetricQuadraticForm",
    "gaussian_reduce",
    "log_gaussian_reduce",
]


# ---------------------------------------------------------------- erfi

_SERIES_TERMS = 80
_SERIES_LIMIT = 3.0


def _check_finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("erfi requires finite input")
    return x


def _erfi_series(x):
    # erfi(x) = 2/sqrt(pi) * sum_n x^(2n+1) / (n! (2n+1)); all terms share
    # the sign of x, so there is no cancellation.
    x2 = x * x
    term = x.copy()
    total = x.copy()
    for n in range(1, _SERIES_TERMS):
        term = term * x2 / n
        contrib = term / (2 * n + 1)
        total = total + contrib
        if np.all(np.abs(contrib) <= 1e-17 * np.abs(total)):
            break
    return 2.0 / SQRT_PI * total


def erfi(x):
    """Imaginary error function ``erfi(x) = -i erf(ix)``.

    Power series for ``|x| <= 3``; beyond that the Dawson-function identity
    ``erfi(x) = 2/sqrt(pi) * exp(x²) * D(x)`` is used. Overflows to ``inf``
    for ``|x|`` above roughly 26.6, like ``exp(x²)`` itself.
    """
    x = _check_finite(x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = np.abs(x) <= _SERIES_LIMIT
    out[small] = _erfi_series(x[small])
    big = ~small
    if np.any(big):
        xb = x[big]
        with np.errstate(over="ignore"):
            out[big] = 2.0 / SQRT_PI * np.exp(xb * xb) * dawsn(xb)
    return out[0] if scalar else out


def scaled_erfi(x):
    """``exp(-x²) * erfi(x)``, evaluated without overflow as ``2 D(x)/sqrt(pi)``."""
    x = _check_finite(x)
    return 2.0 / SQRT_PI * dawsn(x)


# ---------------------------------------------------------- quadrature

@dataclass(frozen=True)
class QuadratureSpec:
    """Discretization policy for integrals over ω ≥ 0.

    Parameters
    ----------
    upper_cutoff : float
        Integration stops at ``upper_cutoff * scale`` where ``scale`` is the
        bath cutoff frequency Λ.
    abs_tolerance : float
        Target absolute error of each probe integral.
    nodes_per_period : int
        Minimum quadrature nodes per oscillation period ``2π/t_max``.
    panel_order : int
        Gauss–Legendre points per panel.
    max_panels : int
        Refinement budget.
    """

    upper_cutoff: float = 8.0
    abs_tolerance: float = 1e-10
    nodes_per_period: int = 12
    panel_order: int = 16
    max_panels: int = 40000

    def __post_init__(self):
        if not self.upper_cutoff > 0:
            raise ValueError("upper_cutoff must be positive")
        if not self.abs_tolerance > 0:
            raise ValueError("abs_tolerance must be positive")
        if self.nodes_per_period < 1 or self.panel_order < 2:
            raise ValueError("invalid panel rule")


@dataclass(frozen=True)
class OmegaQuadrature:
    """Nodes and weights of a composite rule on ``[0, omega_max]``."""

    nodes: np.ndarray
    weights: np.ndarray
    error_estimate: float = 0.0
    panels: int = 0

    def integrate(self, values):
        """Integrate samples taken at :attr:`nodes` (last axis)."""
        return np.asarray(values) @ self.weights

    def __len__(self):
        return self.nodes.size


def _panel_rule(edges, x, w):
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * x).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _eval_probes(probes, nodes):
    return np.vstack([np.asarray(p(nodes), dtype=float).reshape(-1) for p in probes])


def omega_quadrature(probes, scale, t_max=0.0, spec=None, name="frequency integral"):
    """Build a deterministic composite Gauss–Legendre rule on ``[0, ω_max]``.

    Panels start no wider than ``panel_order/nodes_per_period`` oscillation
    periods at ``t_max`` (and no wider than ``scale/2``), then are bisected
    until every probe integrand passes a coarse-vs-halved error test.

    Parameters
    ----------
    probes : sequence of callables
        Vectorized non-oscillatory integrands whose structure must be resolved.
    scale : float
        Frequency scale Λ; the upper limit is ``spec.upper_cutoff * scale``.
    t_max : float
        Largest time at which oscillatory weights will be applied.
    spec : QuadratureSpec, optional
    name : str
        Used in the convergence error message.

    Returns
    -------
    OmegaQuadrature
    """
    spec = spec or QuadratureSpec()
    if not scale > 0:
        raise ValueError("scale must be positive")
    if t_max < 0:
        raise ValueError("t_max must be non-negative")
    if callable(probes):
        probes = [probes]
    omega_max = spec.upper_cutoff * scale
    order = spec.panel_order
    width = 0.5 * scale
    if t_max > 0:
        width = min(width, order / spec.nodes_per_period * 2 * math.pi / t_max)
    n0 = max(1, int(math.ceil(omega_max / width)))
    edges_todo = np.linspace(0.0, omega_max, n0 + 1)
    lefts = edges_todo[:-1]
    rights = edges_todo[1:]

    x, w = np.polynomial.legendre.leggauss(order)
    # A panel passes if its error is within its share of the tolerance.
    per_width = spec.abs_tolerance / omega_max

    accepted_l, accepted_r = [], []
    total_err = 0.0
    while lefts.size:
        if len(accepted_l) + lefts.size > spec.max_panels:
            pending = lefts.size
            raise ConvergenceError(name, total_err + pending * spec.abs_tolerance)
        mids = 0.5 * (lefts + rights)
        half = 0.5 * (rights - lefts)
        coarse_nodes = (mids[:, None] + half[:, None] * x).ravel()
        q = 0.5 * half
        fine_nodes = np.concatenate([
            ((lefts + q)[:, None] + q[:, None] * x).ravel(),
            ((mids + q)[:, None] + q[:, None] * x).ravel(),
        ])
        fc = _eval_probes(probes, coarse_nodes).reshape(len(probes), lefts.size, order)
        ff = _eval_probes(probes, fine_nodes).reshape(len(probes), 2, lefts.size, order)
        qc = (fc @ w) * half
        qf = ((ff @ w) * q).sum(axis=1)
        err = np.max(np.abs(qc - qf), axis=0)
        ok = err <= per_width * (rights - lefts)
        accepted_l.extend(lefts[ok])
        accepted_r.extend(rights[ok])
        total_err += float(err[ok].sum())
        lefts, rights = lefts[~ok], rights[~ok]
        lefts, rights = (np.concatenate([lefts, 0.5 * (lefts + rights)]),
                         np.concatenate([0.5 * (lefts + rights), rights]))

    order_idx = np.argsort(accepted_l)
    edges = np.append(np.asarray(accepted_l)[order_idx], np.asarray(accepted_r)[order_idx][-1])
    nodes, weights = _panel_rule(edges, x, w)
    return OmegaQuadrature(nodes, weights, total_err, len(accepted_l))


def integrate_omega(f, weight="none", t=0.0, scale=1.0, spec=None):
    """Integrate ``f(ω)·weight(ωt)`` over ω ≥ 0.

    Parameters
    ----------
    f : callable
        Vectorized integrand, decaying like ``exp(-ω²/scale²)``.
    weight : {"none", "cos", "sin"}
    t : float
        Time in the trigonometric weight.
    scale : float
        Cutoff frequency of the integrand.
    spec : QuadratureSpec, optional

    Raises
    ------
    ConvergenceError
        If the panel budget is exhausted.
    """
    if weight not in ("none", "cos", "sin"):
        raise ValueError(f"unknown weight {weight!r}")
    if t < 0:
        raise ValueError("t must be non-negative")
    quad = omega_quadrature([f], scale, t_max=t if weight != "none" else 0.0,
                            spec=spec, name="integrate_omega")
    vals = np.asarray(f(quad.nodes), dtype=float)
    if weight == "cos":
        vals = vals * np.cos(quad.nodes * t)
    elif weight == "sin":
        vals = vals * np.sin(quad.nodes * t)
    return float(quad.integrate(vals))


def fourier_table(quad, values, times, kind, chunk=256):
    """Evaluate ``Σ_j w_j v_j(ω_j) trig(ω_j t)`` for every time.

    Parameters
    ----------
    quad : OmegaQuadrature
    values : ndarray, shape (n_omega, m)
        Integrand columns sampled at the nodes.
    times : ndarray, shape (n_t,)
    kind : {"cos", "sin"}

    Returns
    -------
    ndarray, shape (n_t, m)
    """
    values = np.asarray(values, dtype=float)
    squeeze = values.ndim == 1
    if squeeze:
        values = values[:, None]
    weighted = values * quad.weights[:, None]
    trig = np.cos if kind == "cos" else np.sin
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, values.shape[1]))
    for start in range(0, times.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = trig(np.outer(times[sl], quad.nodes)) @ weighted
    return out[:, 0] if squeeze else out


# Cubic-Hermite basis on [0, 1]: value at 0, slope at 0, value at 1, slope at 1.
def _hermite_basis(s):
    s2 = s * s
    s3 = s2 * s
    return np.stack([2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, -2 * s3 + 3 * s2, s3 - s2])


def _hermite_moments(theta):
    """``∫_0^1 h_k(s) exp(iθs) ds`` for the four Hermite basis functions."""
    theta = np.asarray(theta, dtype=float)
    n = 12 + int(math.ceil(float(np.max(np.abs(theta), initial=0.0))))
    x, w = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (x + 1)
    basis = _hermite_basis(s) * (0.5 * w)  # (4, n)
    phase = np.exp(1j * np.outer(theta, s))  # (m, n)
    return phase @ basis.T  # (m, 4)


def cumulative_fourier(f, fdot, dt, omegas):
    """Running integrals ``I(ω, t_n) = ∫_0^{t_n} f(s) exp(iωs) ds``.

    ``f`` is interpolated by cubic Hermite polynomials built from its samples
    and derivative samples on the uniform grid; each step is then integrated
    against ``exp(iωs)`` exactly, so the result stays accurate when ``ω·dt``
    is of order one.

    Parameters
    ----------
    f, fdot : ndarray, shape (n_t,)
        Samples of the function and its derivative at ``n·dt``.
    dt : float
    omegas : ndarray, shape (m,)

    Returns
    -------
    ndarray, complex, shape (m, n_t)
    """
    f = np.asarray(f, dtype=float)
    fdot = np.asarray(fdot, dtype=float)
    omegas = np.asarray(omegas, dtype=float)
    moments = _hermite_moments(omegas * dt)  # (m, 4)
    data = np.stack([f[:-1], dt * fdot[:-1], f[1:], dt * fdot[1:]])  # (4, n-1)
    steps = moments @ data  # (m, n-1)
    t_left = dt * np.arange(f.size - 1)
    steps *= dt * np.exp(1j * np.outer(omegas, t_left))
    out = np.zeros((omegas.size, f.size), dtype=complex)
    np.cumsum(steps, axis=1, out=out[:, 1:])
    return out


# ---------------------------------------------------------------- grids

@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid ``t_n = n·dt`` for ``n = 0..n_steps``."""

    dt: float
    n_steps: int

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("grid needs at least one step")

    @classmethod
    def from_tmax(cls, dt, t_max):
        n = int(round(t_max / dt))
        if n < 1 or abs(n * dt - t_max) > 1e-9 * max(1.0, t_max):
            raise GridError(f"t_max={t_max} is not a multiple of dt={dt}")
        return cls(float(dt), n)

    @property
    def times(self):
        return self.dt * np.arange(self.n_steps + 1)

    @property
    def t_max(self):
        return self.dt * self.n_steps

    def __len__(self):
        return self.n_steps + 1

    def index(self, t, rtol=1e-9):
        """Grid index of time ``t``; off-grid times raise :class:`GridError`."""
        n = int(round(t / self.dt))
        if n < 0 or n > self.n_steps or abs(n * self.dt - t) > rtol * max(self.dt, abs(t)):
            raise GridError(f"time {t} is not on the grid (dt={self.dt}, t_max={self.t_max})")
        return n


# ------------------------------------------------------ Gaussian integrals

MAX_GAUSSIAN_DIM = 16


@dataclass(frozen=True)
class SymmetricQuadraticForm:
    """Exponent ``-½ zᵀMz + bᵀz + c`` of a Gaussian integrand.

    The stored matrix is the symmetric part of the one supplied, so
    ``matrix == matrix.T`` holds exactly.
    """

    matrix: np.ndarray
    linear: np.ndarray = None
    constant: complex = 0.0
    dimension: int = field(init=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex if np.iscomplexobj(self.matrix) else float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        n = m.shape[0]
        if n > MAX_GAUSSIAN_DIM:
            raise ValueError(f"dimension {n} exceeds cap {MAX_GAUSSIAN_DIM}")
        m = 0.5 * (m + m.T)
        b = np.zeros(n) if self.linear is None else np.array(self.linear)
        if b.shape != (n,):
            raise ValueError("linear term length does not match matrix dimension")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "linear", b)
        object.__setattr__(self, "dimension", n)


def log_gaussian_reduce(form, context=""):
    """Natural log of ``∫ exp(-½ zᵀMz + bᵀz + c) dⁿz``.

    Returns ``(n/2)·log 2π - ½ log det M + ½ bᵀM⁻¹b + c``. For complex
    symmetric ``M`` with positive-definite real part all eigenvalues lie in
    the right half-plane, so summing their principal logarithms selects the
    branch obtained by continuation from the real case.

    Raises
    ------
    DivergentIntegralError
        If ``Re M`` is not positive definite.
    """
    m = form.matrix
    n = form.dimension
    re_eigs = np.linalg.eigvalsh(m.real)
    if re_eigs[0] <= 0:
        raise DivergentIntegralError(re_eigs[0], context)
    if np.iscomplexobj(m) and np.any(m.imag != 0):
        logdet = np.sum(np.log(np.linalg.eigvals(m)))
    else:
        m = m.real
        logdet = 2.0 * np.sum(np.log(np.diag(scipy.linalg.cholesky(m))))
    b = form.linear
    if np.any(b != 0):
        sol = scipy.linalg.solve(m, b, assume_a="sym")
        quad = 0.5 * (b @ sol)
    else:
        quad = 0.0
    return 0.5 * n * math.log(2 * math.pi) - 0.5 * logdet + quad + form.constant


def gaussian_reduce(form, context=""):
    """``∫ exp(-½ zᵀMz + bᵀz + c) dⁿz`` in closed form.

    Real inputs give a float, complex inputs a complex number.
    """
    val = np.exp(log_gaussian_reduce(form, context))
    if np.isrealobj(form.matrix) and np.isrealobj(form.linear) and np.isrealobj(form.constant):
        return float(np.real(val))
    return complex(val)
