"""Master-equation coefficients for the damped oscillator.

The Wigner-function master equation

    ∂W/∂t = (-∂_x p + Γ ∂_p p + K ∂_p x - <𝓕> ∂_p + D_x ∂_x∂_p + D_p ∂_p²) W

implies, for a Gaussian state with means (x̄, p̄) and covariances
(σ_x, σ_xp, σ_p), the closed moment flow

    dx̄/dt   = p̄
    dp̄/dt   = -K x̄ - Γ p̄ + <𝓕>
    dσ_x/dt  = 2 σ_xp
    dσ_xp/dt = σ_p - K σ_x - Γ σ_xp + D_x
    dσ_p/dt  = -2K σ_xp - 2Γ σ_p + 2 D_p

obtained by inserting the Gaussian characteristic function into the
characteristic-function form of the equation and matching the P², PQ,
Q², P and Q coefficients. With σ_x = b_x, σ_xp = ḃ_x/2, σ_p = b_p it
reproduces ``D_x = ½b̈_x + ½Γḃ_x + K b_x - b_p`` and
``D_p = ½ḃ_p + ½K ḃ_x + Γ b_p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, MaskedTimeError
from .propagator import spectral_quadrature

__all__ = [
    "MasterCoefficients",
    "PositionPrepCoefficients",
    "exact_coefficients",
    "weak_coupling_coefficients",
    "weak_coupling_at",
    "zeno_exponent",
    "position_prep_coefficients",
    "moment_flow",
    "gaussian_scenario_coefficients",
]


@dataclass(frozen=True)
class MasterCoefficients:
    """Coefficient table ``Γ, K, D_x, D_p`` (and optional drift) on a grid."""

    grid: object
    gamma: np.ndarray
    kappa: np.ndarray
    d_x: np.ndarray
    d_p: np.ndarray
    provenance: str
    valid: np.ndarray = None
    drift: np.ndarray = None

    def __post_init__(self):
        if self.valid is None:
            object.__setattr__(self, "valid", np.ones(len(self.grid), dtype=bool))
        if self.provenance not in ("exact", "weak_coupling", "position_prep", "gaussian"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def at(self, t):
        """Coefficients at grid time ``t`` as a dict; masked times raise."""
        i = self.grid.index(t)
        if not self.valid[i]:
            raise MaskedTimeError(f"coefficients are masked at t={t} (wronskian zero)")
        out = dict(gamma=self.gamma[i], kappa=self.kappa[i], d_x=self.d_x[i], d_p=self.d_p[i])
        out["drift"] = 0.0 if self.drift is None else self.drift[i]
        return out


@dataclass(frozen=True)
class PositionPrepCoefficients:
    """``γ₁, γ₂, D₁, D₂`` for preparations depending on position only."""

    grid: object
    gamma1: np.ndarray
    gamma2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    valid: np.ndarray
    denominator: np.ndarray = field(repr=False, default=None)


def _same_grid(a, b):
    if a != b:
        raise GridError("coefficient inputs live on different grids")


def exact_coefficients(local, moments):
    """Exact ``D_x, D_p`` for a factorized initial state with a thermal bath."""
    _same_grid(local.grid, moments.grid)
    G, K = local.gamma, local.kappa
    m = moments
    d_x = 0.5 * m.bx_dd + 0.5 * G * m.bx_d + K * m.bx - m.bp
    d_p = 0.5 * m.bp_d + 0.5 * K * m.bx_d + G * m.bp
    return MasterCoefficients(local.grid, G, K, d_x, d_p, "exact", local.valid.copy())


# ---------------------------------------------------------- weak coupling

def _sinc(x):
    return np.sinc(x / math.pi)


def _cosc(x):
    # (1 - cos x)/x, regular at 0
    return 0.5 * x * _sinc(0.5 * x) ** 2


def weak_coupling_at(bath, osc, times, quad):
    """O(η) coefficients at arbitrary times.

    The time integrals against ``G₀ = sin(ω₀t)/ω₀`` are done analytically
    inside the frequency representation of ``μ̇`` and ``ν``. ``K_w`` carries
    the constant ``μ(0)`` so that it is the O(η) expansion of the exact ``K``,
    whose initial value is ``k + μ(0)``.

    Returns
    -------
    dict of ndarray
        Keys ``gamma, kappa, d_x, d_p``.
    """
    t = np.atleast_1d(np.asarray(times, dtype=float))[:, None]
    w = quad.nodes[None, :]
    w0 = osc.omega0
    fw = quad.weights * bath.friction_real(quad.nodes) * quad.nodes * (2 / math.pi)
    ew = quad.weights * bath.noise_spectrum(quad.nodes)
    s_minus, s_plus = _sinc((w0 - w) * t), _sinc((w0 + w) * t)
    c_minus, c_plus = _cosc((w0 - w) * t), _cosc((w0 + w) * t)
    half_t = 0.5 * t[:, 0]
    gamma = half_t * ((s_minus - s_plus) @ fw) / w0
    kappa = osc.spring_k + float(bath.memory_kernel(0.0)) - half_t * ((c_plus - c_minus) @ fw)
    d_x = half_t * ((c_plus + c_minus) @ ew) / w0
    d_p = half_t * ((s_minus + s_plus) @ ew)
    return dict(gamma=gamma, kappa=kappa, d_x=d_x, d_p=d_p)


def weak_coupling_coefficients(bath, osc, grid, spec=None, quad=None, chunk=512):
    """Tabulate the O(η) coefficients on ``grid``."""
    if quad is None:
        quad = spectral_quadrature(bath, osc, grid.t_max, spec)
    times = grid.times
    parts = [weak_coupling_at(bath, osc, times[i:i + chunk], quad)
             for i in range(0, times.size, chunk)]
    cols = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
    return MasterCoefficients(grid, cols["gamma"], cols["kappa"], cols["d_x"], cols["d_p"],
                              "weak_coupling")


def zeno_exponent(bath, osc, times, quad):
    """``γ(t) = ∫_0^t D_p - (ω₀/2) ∫_0^t Γ`` with the O(η) coefficients.

    Uses ``∫_0^t (t-u) cos(cu) du = (t²/2) sinc²(ct/2)``, so no time
    quadrature is involved.
    """
    t = np.atleast_1d(np.asarray(times, dtype=float))[:, None]
    w = quad.nodes[None, :]
    w0 = osc.omega0
    fw = quad.weights * bath.friction_real(quad.nodes) * quad.nodes * (2 / math.pi)
    ew = quad.weights * bath.noise_spectrum(quad.nodes)
    j_minus = 0.5 * t * t * _sinc(0.5 * (w0 - w) * t) ** 2
    j_plus = 0.5 * t * t * _sinc(0.5 * (w0 + w) * t) ** 2
    int_dp = 0.5 * ((j_minus + j_plus) @ ew)
    int_gamma = 0.5 * ((j_minus - j_plus) @ fw) / w0
    return int_dp - 0.5 * w0 * int_gamma


# ------------------------------------------------ position-only preparation

def position_prep_coefficients(prop, corr, threshold=1e-12):
    """Coefficients of the master equation for ``f = f(x)`` preparations.

    ``γ₁ = (G S̈ - G̈ S)/Δ``, ``γ₂ = (G̈ Ṡ - Ġ S̈)/Δ`` with ``Δ = Ġ S - G Ṡ``,
    ``D₁ = γ₂<x²> - <p²>``, ``D₂ = γ₁<p²>``; the equation reads
    ``∂_t W̃ = [(P - γ₁Q)∂_Q - γ₂Q ∂_P - D₁PQ - D₂Q²] W̃``. Points with
    ``|Δ| < threshold`` are masked.
    """
    _same_grid(prop.grid, corr.grid)
    G, Gd, Gdd = prop.G, prop.Gd, prop.Gdd
    S, Sd, Sdd = corr.S, corr.Sd, corr.Sdd
    den = Gd * S - G * Sd
    valid = np.abs(den) >= threshold
    safe = np.where(valid, den, 1.0)
    g1 = np.where(valid, (G * Sdd - Gdd * S) / safe, np.nan)
    g2 = np.where(valid, (Gdd * Sd - Gd * Sdd) / safe, np.nan)
    d1 = g2 * corr.x2 - corr.p2
    d2 = g1 * corr.p2
    return PositionPrepCoefficients(prop.grid, g1, g2, d1, d2, valid, den)


# ------------------------------------------------------------ moment flow

def moment_flow(state, gamma, kappa, d_x, d_p, drift=0.0):
    """Time derivative of ``(x̄, p̄, σ_x, σ_xp, σ_p)`` under the master equation.

    ``state`` may be a :class:`~dampedqho.scenarios.GaussianState` or a
    :class:`~dampedqho.scenarios.Trajectory` (then coefficient arguments are
    arrays on its grid). Coefficient values must be finite.
    """
    vals = np.broadcast_arrays(gamma, kappa, d_x, d_p)
    if not all(np.all(np.isfinite(v)) for v in vals):
        raise MaskedTimeError("moment flow requested where coefficients are masked")
    x, p = state.mean_x, state.mean_p
    sx, sxp, sp = state.var_x, state.cov_xp, state.var_p
    return (
        p,
        -kappa * x - gamma * p + drift,
        2 * sxp,
        sp - kappa * sx - gamma * sxp + d_x,
        -2 * kappa * sxp - 2 * gamma * sp + 2 * d_p,
    )


def moment_flow_at(state, coeffs, t):
    """:func:`moment_flow` with coefficients read from a table at grid time ``t``."""
    c = coeffs.at(t)
    return moment_flow(state, c["gamma"], c["kappa"], c["d_x"], c["d_p"], c["drift"])


def gaussian_scenario_coefficients(traj, local):
    """Invert the moment flow along a Gaussian trajectory.

    ``<𝓕> = dp̄/dt + K x̄ + Γ p̄``,
    ``D_x = dσ_xp/dt - σ_p + K σ_x + Γ σ_xp``,
    ``D_p = ½ (dσ_p/dt + 2K σ_xp + 2Γ σ_p)``.

    Derivatives come from the trajectory when it carries them, otherwise
    from second-order finite differences.
    """
    _same_grid(traj.grid, local.grid)
    G, K = local.gamma, local.kappa
    d_mean_p, d_cov_xp, d_var_p = traj.derivatives()
    drift = d_mean_p + K * traj.mean_x + G * traj.mean_p
    d_x = d_cov_xp - traj.var_p + K * traj.var_x + G * traj.cov_xp
    d_p = 0.5 * (d_var_p + 2 * K * traj.cov_xp + 2 * G * traj.var_p)
    return MasterCoefficients(local.grid, G, K, d_x, d_p, "gaussian", local.valid.copy(), drift)
