"""Gaussian-state evolution for three kinds of initial condition.

* correlated preparation: a displaced squeezed projector applied to the
  Gibbs state of the coupled system at ``t = 0``;
* factorized: an arbitrary Gaussian oscillator state times the thermal bath;
* quench: the Gibbs state for spring ``k_old`` evolved with ``k_new``.

Each route returns a :class:`Trajectory` with the analytic time
derivatives needed by the master-equation inversion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import BathSpectrum, OscillatorParams
from .correlation import build_correlation, cumulative_integral, spectral_moments
from .errors import GridError, PhysicalityError
from .gaussian_algebra import Insertion, marginal_moments, wigner_rep
from .numerics import TimeGrid
from .propagator import build_propagator, spectral_quadrature

__all__ = [
    "GaussianState",
    "Trajectory",
    "PreparationSpec",
    "QuenchSpec",
    "purity",
    "evolve_correlated_prep",
    "correlated_prep_engine",
    "evolve_factorized",
    "evolve_quench",
    "high_T_mean",
    "short_time_purity",
]

UNCERTAINTY_SLACK = 1e-9


@dataclass(frozen=True)
class GaussianState:
    """Means and covariances of a single-mode Gaussian state."""

    mean_x: float = 0.0
    mean_p: float = 0.0
    var_x: float = 0.5
    cov_xp: float = 0.0
    var_p: float = 0.5

    def __post_init__(self):
        if not (self.var_x > 0 and self.var_p > 0):
            raise PhysicalityError(f"variances must be positive, got {self.var_x}, {self.var_p}")
        det = self.var_x * self.var_p - self.cov_xp ** 2
        if det < 0.25 - UNCERTAINTY_SLACK:
            raise PhysicalityError(f"uncertainty relation violated: det = {det:.12g} < 1/4")

    @property
    def determinant(self):
        return self.var_x * self.var_p - self.cov_xp ** 2


def purity(state):
    """``1/√(4σ_xσ_p - 4σ_xp²)``; accepts a state or a trajectory."""
    det = state.var_x * state.var_p - state.cov_xp ** 2
    if np.any(np.asarray(det) < 0.25 - UNCERTAINTY_SLACK):
        raise PhysicalityError("uncertainty relation violated")
    out = 1.0 / np.sqrt(4.0 * det)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Trajectory:
    """Moments on a time grid, with optional analytic derivatives.

    ``d_mean_p``, ``d_cov_xp``, ``d_var_p`` are the time derivatives used
    to invert the moment flow; when absent they are replaced by
    finite differences.
    """

    grid: TimeGrid
    mean_x: np.ndarray
    mean_p: np.ndarray
    var_x: np.ndarray
    cov_xp: np.ndarray
    var_p: np.ndarray
    d_mean_p: np.ndarray = None
    d_cov_xp: np.ndarray = None
    d_var_p: np.ndarray = None

    @property
    def times(self):
        return self.grid.times

    def derivatives(self):
        dt = self.grid.dt

        def fd(y):
            return np.gradient(y, dt, edge_order=2)

        return (self.d_mean_p if self.d_mean_p is not None else fd(self.mean_p),
                self.d_cov_xp if self.d_cov_xp is not None else fd(self.cov_xp),
                self.d_var_p if self.d_var_p is not None else fd(self.var_p))

    def state(self, t):
        i = self.grid.index(t)
        return GaussianState(float(self.mean_x[i]), float(self.mean_p[i]), float(self.var_x[i]),
                             float(self.cov_xp[i]), float(self.var_p[i]))

    def determinant(self):
        return self.var_x * self.var_p - self.cov_xp ** 2

    def purity(self):
        return purity(self)


# ------------------------------------------------------------ preparation

@dataclass(frozen=True)
class PreparationSpec:
    """Displaced squeezed projector ``f₀``.

    Parameters
    ----------
    x0 : float
        Displacement of the target state.
    lam : float
        Squeezing ``λ = e^{2r}``; the target state has ``<x²> = 1/(2λ)``.
    """

    x0: float = 1.0
    lam: float = 10.0

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError("squeezing λ must be positive")

    @property
    def delta_x(self):
        return 1.0 / (2 * self.lam)

    @property
    def delta_p(self):
        return self.lam / 2

    def widths(self, x2, p2):
        """``(w_x, w_p) = (1 + 2λ<x²>, 1 + 2<p²>/λ)``."""
        return 1 + 4 * self.delta_p * x2, 1 + 4 * self.delta_x * p2

    def normalization(self, x2, p2):
        """``Z = <f₀† f₀>`` over the Gibbs marginal."""
        wx, wp = self.widths(x2, p2)
        return 2.0 / math.sqrt(wx * wp) * math.exp(-self.x0 ** 2 / (2 * (self.delta_x + x2)))

    def rep(self):
        return wigner_rep("displaced_squeezed", 0, x0=self.x0, lam=self.lam)


@dataclass(frozen=True)
class QuenchSpec:
    """Sudden change of spring constant from ``k_old`` to ``k_new`` at ``t = 0``."""

    k_old: float = 0.01
    k_new: float = 1.0

    def __post_init__(self):
        if not (self.k_old > 0 and self.k_new > 0):
            raise ValueError("spring constants must be positive")

    @property
    def epsilon(self):
        return self.k_old - self.k_new


def _check(prop, corr):
    if prop.grid != corr.grid:
        raise GridError("propagator and correlation tables live on different grids")


def evolve_correlated_prep(prep, prop, corr):
    """Closed-form moments after preparing with a displaced squeezed projector.

    With ``u = Ġ + 2λS`` and ``v = λG - 2Ṡ``:

        σ_x = <x²> + (λ²G² + Ġ²)/λ - u²/(2λw_x) - v²/(2λw_p)
        x̄   = u x̄₀ / w_x

    and ``σ_p``, ``p̄`` follow with one more time derivative. ``σ_xp`` and
    the flow derivatives are the exact derivatives of these expressions.
    """
    _check(prop, corr)
    lam, x0 = prep.lam, prep.x0
    x2, p2 = corr.x2, corr.p2
    wx, wp = prep.widths(x2, p2)
    G, Gd, Gdd, G3 = prop.values.T
    S, Sd, Sdd, S3 = corr.values.T
    u, ud, udd = Gd + 2 * lam * S, Gdd + 2 * lam * Sd, G3 + 2 * lam * Sdd
    v, vd, vdd = lam * G - 2 * Sd, lam * Gd - 2 * Sdd, lam * Gdd - 2 * S3
    a, b = 1.0 / (2 * lam * wx), 1.0 / (2 * lam * wp)
    sx = x2 + (lam * lam * G * G + Gd * Gd) / lam - a * u * u - b * v * v
    sp = p2 + (lam * lam * Gd * Gd + Gdd * Gdd) / lam - a * ud * ud - b * vd * vd
    sx_d = 2 * (lam * lam * G * Gd + Gd * Gdd) / lam - 2 * a * u * ud - 2 * b * v * vd
    sx_dd = (2 * (lam * lam * (Gd * Gd + G * Gdd) + Gdd * Gdd + Gd * G3) / lam
             - 2 * a * (ud * ud + u * udd) - 2 * b * (vd * vd + v * vdd))
    sp_d = 2 * (lam * lam * Gd * Gdd + Gdd * G3) / lam - 2 * a * ud * udd - 2 * b * vd * vdd
    return Trajectory(prop.grid, u * x0 / wx, ud * x0 / wx, sx, 0.5 * sx_d, sp,
                      d_mean_p=udd * x0 / wx, d_cov_xp=0.5 * sx_dd, d_var_p=sp_d)


def correlated_prep_engine(prep_or_rep, cov, times):
    """Moments after a preparation, through the general Gaussian reduction.

    Evaluates ``<f₀† e^{-i(Px(t)+Qp(t))} f₀> / <f₀† f₀>`` for each time.

    Parameters
    ----------
    prep_or_rep : PreparationSpec or GOrderedRep
        Preparation operator; a bare symbol (e.g. from
        :func:`~dampedqho.gaussian_algebra.position_filter`) is accepted.
    cov : OrderedCovariance
    times : sequence of float
        Grid times.

    Returns
    -------
    dict
        Arrays ``mean_x, mean_p, var_x, cov_xp, var_p`` and the scalar
        ``log_norm`` (log of ``<f₀† f₀>``).
    """
    rep = prep_or_rep.rep() if isinstance(prep_or_rep, PreparationSpec) else prep_or_rep
    out = {k: [] for k in ("mean_x", "mean_p", "var_x", "cov_xp", "var_p")}
    log_norm = None
    for t in times:
        sigma, mean, log_norm = marginal_moments(
            [Insertion(0.0, rep.adjoint()), Insertion(t), Insertion(0.0, rep)], cov,
            context=f"prepared state at t={t}")
        out["mean_x"].append(mean[0])
        out["mean_p"].append(mean[1])
        out["var_x"].append(sigma[0, 0])
        out["cov_xp"].append(sigma[0, 1])
        out["var_p"].append(sigma[1, 1])
    res = {k: np.array(v) for k, v in out.items()}
    res["log_norm"] = log_norm
    return res


# ------------------------------------------------------------- factorized

def evolve_factorized(initial, prop, noise):
    """Factorized initial state ``ρ_S ⊗ ρ_B^T`` evolved exactly.

    ``σ_x = Ġ²σ_x0 + G²σ_p0 + 2ĠGσ_xp0 + b_x``, ``x̄ = Ġx̄₀ + Gp̄₀`` and
    the momentum moments with ``G → Ġ``.
    """
    if prop.grid != noise.grid:
        raise GridError("propagator and noise moments live on different grids")
    G, Gd, Gdd, G3 = prop.values.T
    s, c, q = initial.var_x, initial.cov_xp, initial.var_p
    x0, p0 = initial.mean_x, initial.mean_p
    n = noise
    sx = Gd * Gd * s + G * G * q + 2 * Gd * G * c + n.bx
    sp = Gdd * Gdd * s + Gd * Gd * q + 2 * Gdd * Gd * c + n.bp
    sxp = Gd * Gdd * s + G * Gd * q + (Gd * Gd + G * Gdd) * c + 0.5 * n.bx_d
    sx_dd = (2 * (Gdd * Gdd + Gd * G3) * s + 2 * (Gd * Gd + G * Gdd) * q
             + 2 * (3 * Gd * Gdd + G * G3) * c + n.bx_dd)
    sp_d = 2 * Gdd * G3 * s + 2 * Gd * Gdd * q + 2 * (G3 * Gd + Gdd * Gdd) * c + n.bp_d
    return Trajectory(prop.grid, Gd * x0 + G * p0, Gdd * x0 + Gd * p0, sx, sxp, sp,
                      d_mean_p=G3 * x0 + Gdd * p0, d_cov_xp=0.5 * sx_dd, d_var_p=sp_d)


# ----------------------------------------------------------------- quench

def evolve_quench(q, bath, grid, spec=None, quad=None):
    """Gibbs state of ``k_old`` evolved with ``k_new``.

    Writing the new dynamics as the old one plus the force ``ε x`` gives
    ``x(t) = x_old(t) + ε ∫_0^t G̃(t-s) x_old(s) ds`` with ``G̃`` the Green
    function at ``k_new``. Hence

        σ_x = <x²> + 2ε ∫_0^t G̃S + ε² ∫∫ G̃(u)G̃(u')S(u-u')
        σ_p = <p²> + 2ε ∫_0^t Ġ̃Ṡ + ε² ∫∫ Ġ̃(u)Ġ̃(u')S(u-u')

    The double integrals are ``(1/π) ∫ α''_old coth |∫_0^t G̃ e^{iωu} du|² dω``.

    Returns
    -------
    Trajectory
        Zero means; ``cov_xp = ½ dσ_x/dt``.
    """
    old, new = OscillatorParams(q.k_old), OscillatorParams(q.k_new)
    if quad is None and bath.eta > 0:
        quad = spectral_quadrature(bath, [old, new], grid.t_max, spec)
    corr = build_correlation(bath, old, grid, spec, quad)
    prop = build_propagator(bath, new, grid, spec, quad)
    eps = q.epsilon
    G, Gd, Gdd, G3 = prop.values.T
    S, Sd, Sdd, S3 = corr.values.T
    x2, p2 = corr.x2, corr.p2
    dt = grid.dt
    if eps == 0:
        z = np.zeros(len(grid))
        return Trajectory(grid, z, z.copy(), np.full(len(grid), x2), z.copy(), np.full(len(grid), p2),
                          d_mean_p=z.copy(), d_cov_xp=z.copy(), d_var_p=z.copy())
    if bath.eta == 0:
        # no bath: plain free evolution of the old ground/thermal state
        return evolve_factorized(GaussianState(0.0, 0.0, x2, 0.0, p2), prop,
                                 _zero_noise(grid))
    weight = bath.susceptibility_imag_over_omega(quad.nodes, old) * bath.omega_coth(quad.nodes) / math.pi
    ax, ax_d, ax_dd = spectral_moments(G, Gd, dt, quad, weight)
    ap, ap_d, _ = spectral_moments(Gd, Gdd, dt, quad, weight)
    f_x, f_x_d = G * S, Gd * S + G * Sd
    f_p, f_p_d = Gd * Sd, Gdd * Sd + Gd * Sdd
    sx = x2 + 2 * eps * cumulative_integral(f_x, f_x_d, dt) + eps * eps * ax
    sx_d = 2 * eps * f_x + eps * eps * ax_d
    sx_dd = 2 * eps * f_x_d + eps * eps * ax_dd
    sp = p2 + 2 * eps * cumulative_integral(f_p, f_p_d, dt) + eps * eps * ap
    sp_d = 2 * eps * f_p + eps * eps * ap_d
    z = np.zeros(len(grid))
    return Trajectory(grid, z, z.copy(), sx, 0.5 * sx_d, sp,
                      d_mean_p=z.copy(), d_cov_xp=0.5 * sx_dd, d_var_p=sp_d)


def _zero_noise(grid):
    from .correlation import NoiseMoments

    z = np.zeros(len(grid))
    return NoiseMoments(grid, z, z, z, z, z)


# ------------------------------------------------------------- asymptotics

def high_T_mean(prep, bath, osc, grid, spec=None):
    """Prepared mean at high temperature against its classical asymptote.

    For ``T ≫ Λ ≫ ω₀`` the symmetrized correlation tends to
    ``T (1/k - ∫_0^t G)``, so ``x̄_t → (1 - k ∫_0^t G) x̄₀``.

    Returns
    -------
    exact, asymptote, uncorrelated : ndarray
        The closed-form prepared mean, the asymptote and ``Ġ x̄₀``.
    """
    quad = spectral_quadrature(bath, osc, grid.t_max, spec) if bath.eta > 0 else None
    prop = build_propagator(bath, osc, grid, spec, quad)
    corr = build_correlation(bath, osc, grid, spec, quad)
    traj = evolve_correlated_prep(prep, prop, corr)
    int_g = cumulative_integral(prop.G, prop.Gd, grid.dt)
    asym = (1.0 - osc.spring_k * int_g) * prep.x0
    return traj.mean_x, asym, prop.Gd * prep.x0


def short_time_purity(bath, osc, lam, n_points=200, span=0.1, spec=None):
    """Fit ``1 - purity = c t²`` for a factorized squeezed state.

    The window is ``[0, span·√λ/Λ]`` sampled with ``n_points`` intervals.

    Returns
    -------
    c : float
    r_squared : float
        Coefficient of determination of the one-parameter fit.
    times, deficit : ndarray
    """
    from .correlation import build_noise_moments

    t_end = span * math.sqrt(lam) / bath.cutoff_lambda
    grid = TimeGrid(t_end / n_points, n_points)
    quad = spectral_quadrature(bath, osc, grid.t_max, spec) if bath.eta > 0 else None
    prop = build_propagator(bath, osc, grid, spec, quad)
    noise = build_noise_moments(prop, bath, spec, quad)
    init = GaussianState(0.0, 0.0, 1.0 / (2 * lam), 0.0, lam / 2)
    traj = evolve_factorized(init, prop, noise)
    deficit = 1.0 - traj.purity()
    t2 = grid.times ** 2
    c = float(t2 @ deficit / (t2 @ t2))
    resid = deficit - c * t2
    tot = deficit - deficit.mean()
    r2 = 1.0 - float(resid @ resid) / float(tot @ tot)
    return c, r2, grid.times, deficit
