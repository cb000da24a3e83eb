"""Phase-space calculus for exponentials of linear forms in ``x(t), p(t)``.

All two-point functions come from the Gibbs state of the coupled system,
which is Gaussian with zero mean. For ``τ = t_a - t_b``

    <x(t_a) x(t_b)> = C(τ) = S(τ) - (i/2) G(τ)

with ``S`` even and ``G`` continued as an odd function; the momentum
entries follow by differentiation, ``<p_a x_b> = C'(τ)``,
``<x_a p_b> = -C'(τ)`` and ``<p_a p_b> = -C''(τ)``.

Operators with Gaussian Weyl symbols are written as
``f = (1/2π) ∫ Ã(P, Q) e^{i(Px + Qp)} dP dQ``. A string of such operators
at various times becomes a Gaussian integral over the ``(P, Q)`` pairs of
an exponent built from the ordered covariance, which is reduced in
closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError
from .numerics import SymmetricQuadraticForm, log_gaussian_reduce

__all__ = [
    "LinearForm",
    "OrderedCovariance",
    "GOrderedRep",
    "Insertion",
    "ordered_covariance",
    "commutator",
    "merge_exponentials",
    "gaussian_expectation",
    "wigner_rep",
    "position_filter",
    "string_expectation",
    "string_quadratic_form",
    "marginal_moments",
]

_KINDS = ("position", "momentum")


def _kind(kind):
    k = {"x": "position", "p": "momentum"}.get(kind, kind)
    if k not in _KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    return k


@dataclass(frozen=True)
class LinearForm:
    """``Σ c_k r_k(t_k)`` with ``r ∈ {x, p}``."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((_kind(k), float(t), complex(c))
                                                for k, t, c in self.terms))

    @classmethod
    def single(cls, kind, time, coefficient=1.0):
        return cls(((kind, time, coefficient),))

    @classmethod
    def phase_space(cls, P, Q, time, scale=-1j):
        """``scale·(P x(t) + Q p(t))``; the default gives ``-i(Px + Qp)``."""
        return cls((("position", time, scale * P), ("momentum", time, scale * Q)))

    def __add__(self, other):
        return LinearForm(self.terms + other.terms)

    def __mul__(self, c):
        return LinearForm(tuple((k, t, c * v) for k, t, v in self.terms))

    __rmul__ = __mul__

    def adjoint(self):
        """Hermitian conjugate (``x`` and ``p`` are Hermitian)."""
        return LinearForm(tuple((k, t, v.conjugate()) for k, t, v in self.terms))


class OrderedCovariance:
    """Ordered two-point function of the Gibbs state on a shared grid."""

    def __init__(self, prop, corr):
        if prop.grid != corr.grid:
            raise GridError("propagator and correlation tables live on different grids")
        self.grid = prop.grid
        self._G = prop.values
        self._S = corr.values

    def _index(self, t):
        return self.grid.index(t)

    def kernel(self, i):
        """``(C, C', C'')`` at signed lag ``i·dt``."""
        j = abs(int(i))
        s = self._S[j]
        g = self._G[j]
        sgn = 1.0 if i >= 0 else -1.0
        # S even: S, sgnṠ, S̈ ; G odd: sgnG, Ġ, sgnG̈
        c0 = s[0] - 0.5j * sgn * g[0]
        c1 = sgn * s[1] - 0.5j * g[1]
        c2 = s[2] - 0.5j * sgn * g[2]
        return c0, c1, c2

    def block_index(self, ia, ib):
        """2×2 matrix ``<r_a r_bᵀ>`` for grid indices ``ia``, ``ib``."""
        c0, c1, c2 = self.kernel(ia - ib)
        return np.array([[c0, -c1], [c1, -c2]])

    def block(self, ta, tb):
        return self.block_index(self._index(ta), self._index(tb))

    def pair(self, a, b):
        """``<a b>`` for ``a = (kind, time)``, ``b = (kind, time)``."""
        ka, ta = _kind(a[0]), a[1]
        kb, tb = _kind(b[0]), b[1]
        blk = self.block(ta, tb)
        return complex(blk[_KINDS.index(ka), _KINDS.index(kb)])


def ordered_covariance(a, b, cov):
    """``<a b>`` with ``a`` the leftmost operator."""
    return cov.pair(a, b)


def _pair_sum(fa, fb, cov):
    return sum(ca * cb * cov.pair((ka, ta), (kb, tb))
               for ka, ta, ca in fa.terms for kb, tb, cb in fb.terms)


def commutator(fa, fb, cov):
    """Scalar ``[A, B]`` for linear forms."""
    return _pair_sum(fa, fb, cov) - _pair_sum(fb, fa, cov)


def merge_exponentials(forms, cov):
    """Combine ``∏ e^{A_k}`` into ``e^{phase} e^{Σ A_k}``.

    Returns
    -------
    total : LinearForm
    phase : complex
        ``½ Σ_{j<k} [A_j, A_k]``.
    """
    forms = list(forms)
    total = LinearForm()
    phase = 0j
    for k, f in enumerate(forms):
        for g in forms[:k]:
            phase += 0.5 * commutator(g, f, cov)
        total = total + f
    return total, phase


def gaussian_expectation(form, cov):
    """``<e^A> = exp(½<A²>)`` in the zero-mean Gibbs state."""
    return complex(np.exp(0.5 * _pair_sum(form, form, cov)))


# ------------------------------------------------------- g-ordered symbols

@dataclass(frozen=True)
class GOrderedRep:
    """``Ã_g(P, Q) = exp(-½ zᵀDz + βᵀz + c)`` with ``z = (P, Q)``.

    ``Ã_g = Tr[A e^{-i(Px + Qp) + igPQ/2}]``; ``g = 1, 0, -1`` gives
    normal, Wigner and anti-normal ordering.
    """

    g: int
    matrix: np.ndarray
    linear: np.ndarray
    constant: complex = 0.0

    def __call__(self, P, Q):
        P = np.asarray(P)
        Q = np.asarray(Q)
        D, b = self.matrix, self.linear
        expo = (-0.5 * (D[0, 0] * P * P + 2 * D[0, 1] * P * Q + D[1, 1] * Q * Q)
                + b[0] * P + b[1] * Q + self.constant)
        return np.exp(expo)

    def reorder(self, g):
        """Same operator in ordering ``g``."""
        D = np.array(self.matrix, dtype=complex)
        shift = -0.5j * (g - self.g)
        D[0, 1] += shift
        D[1, 0] += shift
        return GOrderedRep(g, D, self.linear, self.constant)

    def adjoint(self):
        """Wigner symbol of ``A†``: ``conj(Ã(-P, -Q))``."""
        if self.g != 0:
            raise ValueError("adjoint is defined for the Wigner symbol (g=0)")
        # conj(exp(-½zᵀDz + βᵀz + c)) at -z
        return GOrderedRep(0, np.conj(self.matrix), -np.conj(self.linear),
                           np.conj(self.constant))


def wigner_rep(op, g=0, x0=0.0, lam=1.0):
    """Characteristic function of a supported operator.

    Parameters
    ----------
    op : {"vacuum_projector", "displaced_squeezed"}
        Projector onto the vacuum, or onto the squeezed state with
        ``<x²> = 1/(2λ)`` displaced to ``<x> = x0``.
    g : {-1, 0, 1}
    """
    if g not in (-1, 0, 1):
        raise ValueError("ordering g must be -1, 0 or 1")
    if op == "vacuum_projector":
        x0, lam = 0.0, 1.0
    elif op != "displaced_squeezed":
        raise ValueError(f"unsupported operator {op!r}")
    if not lam > 0:
        raise ValueError("squeezing λ must be positive")
    D = np.diag([1.0 / (2 * lam), lam / 2]).astype(complex)
    b = np.array([-1j * x0, 0.0])
    return GOrderedRep(0, D, b).reorder(g)


def position_filter(width_sq, x0=0.0):
    """Symbol of the multiplication operator ``exp(-(x - x0)²/(2 width_sq))``.

    Only ``P`` is integrated (``f = (1/2π)∫ f̂(P) e^{iPx} dP``), so the
    quadratic-form data are 1×1. The constant ``√(2π width_sq)`` is dropped;
    it cancels from every normalized quantity.
    """
    if not width_sq > 0:
        raise ValueError("width_sq must be positive")
    return GOrderedRep(0, np.array([[width_sq]], dtype=complex), np.array([-1j * x0]))


# ---------------------------------------------------------- string engine

@dataclass(frozen=True)
class Insertion:
    """One factor of an operator string at grid time ``time``.

    ``rep`` is a Wigner symbol (integrated over its own ``(P, Q)`` pair) or
    ``None`` for the fixed exponential ``e^{-i(Px + Qp)}`` whose ``(P, Q)``
    are left free.
    """

    time: float
    rep: GOrderedRep = None

    @property
    def integrated(self):
        return self.rep is not None


@dataclass(frozen=True)
class StringForm:
    """Gaussian integrand of an operator string.

    ``form`` is the quadratic form over the integrated variables ``z``;
    ``coupling`` and ``free_matrix`` give the ``z``–``v`` and ``v``–``v``
    blocks for the free variables ``v``.
    """

    form: SymmetricQuadraticForm
    coupling: np.ndarray
    free_matrix: np.ndarray
    n_free: int
    rank: int = field(default=0)


def string_quadratic_form(insertions, cov):
    """Assemble the exponent for ``<∏ f_k>`` over the Gibbs state."""
    insertions = list(insertions)
    m = len(insertions)
    idx = [cov.grid.index(ins.time) for ins in insertions]
    M = np.zeros((2 * m, 2 * m), dtype=complex)
    for j in range(m):
        for k in range(j, m):
            blk = cov.block_index(idx[j], idx[k])
            if j == k:
                blk = 0.5 * (blk + blk.T)
            M[2 * j:2 * j + 2, 2 * k:2 * k + 2] = blk
            M[2 * k:2 * k + 2, 2 * j:2 * j + 2] = blk.T
    n_int = sum(ins.rep.matrix.shape[0] for ins in insertions if ins.integrated)
    n_free = 2 if any(not ins.integrated for ins in insertions) else 0
    L = np.zeros((2 * m, n_int + n_free))
    D = np.zeros((n_int, n_int), dtype=complex)
    beta = np.zeros(n_int, dtype=complex)
    const = 0j
    col = 0
    for j, ins in enumerate(insertions):
        if ins.integrated:
            d = ins.rep.matrix.shape[0]  # 1 for position-only symbols
            L[2 * j:2 * j + d, col:col + d] = np.eye(d)
            D[col:col + d, col:col + d] = ins.rep.matrix
            beta[col:col + d] = ins.rep.linear
            const += ins.rep.constant
            col += d
        else:
            L[2 * j:2 * j + 2, n_int:n_int + 2] = -np.eye(2)
    full = L.T @ M @ L
    zz = D + full[:n_int, :n_int]
    form = SymmetricQuadraticForm(zz, beta, const - n_int / 2 * math.log(2 * math.pi))
    rank = int(np.linalg.matrix_rank(zz)) if n_int else 0
    return StringForm(form, full[:n_int, n_int:], full[n_int:, n_int:], n_free, rank)


def string_expectation(insertions, cov, context="operator string"):
    """``<f_1 f_2 … f_m>`` for integrated insertions only."""
    sf = string_quadratic_form(insertions, cov)
    if sf.n_free:
        raise ValueError("string has free variables; use marginal_moments")
    if sf.form.dimension == 0:
        return 1.0 + 0j
    return complex(np.exp(log_gaussian_reduce(sf.form, context)))


def marginal_moments(insertions, cov, context="operator string"):
    """Moments of the state defined by a string with one free insertion.

    For ``<… e^{-i(Px(t)+Qp(t))} …> / <… …>`` (the free insertion removed
    from the denominator) the log is ``-½ vᵀΣv - i m·v`` exactly; the
    covariance ``Σ`` and mean ``m`` follow from the Schur complement.

    Returns
    -------
    cov_matrix : ndarray, shape (2, 2), complex
    mean : ndarray, shape (2,), complex
    log_norm : complex
        Log of the denominator.
    """
    sf = string_quadratic_form(insertions, cov)
    if sf.n_free != 2:
        raise ValueError("exactly one free insertion is required")
    A = sf.form.matrix
    b = sf.form.linear
    if A.shape[0] == 0:
        sigma = sf.free_matrix
        lin = np.zeros(2, dtype=complex)
        log_norm = 0j
    else:
        sol = np.linalg.solve(A, np.column_stack([sf.coupling, b]))
        sigma = sf.free_matrix - sf.coupling.T @ sol[:, :2]
        lin = -sf.coupling.T @ sol[:, 2]
        log_norm = log_gaussian_reduce(sf.form, context)
    return 0.5 * (sigma + sigma.T), 1j * lin, log_norm
