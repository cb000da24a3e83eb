"""Repeated projective measurements on the oscillator in the Gibbs state.

The joint probability of outcomes ``f₀, f₁, …, f_n`` at times
``t₀ < t₁ < … < t_n`` is ``<f₀† f₁† … f_n† f_n … f₁ f₀>``. Each factor is a
Gaussian phase-space integral, so the whole string reduces to one
Gaussian integral over ``2·(2n+2)`` variables.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergentIntegralError
from .gaussian_algebra import Insertion, string_expectation, string_quadratic_form, wigner_rep
from .master import zeno_exponent

__all__ = [
    "MeasurementSchedule",
    "SurvivalResult",
    "joint_quantity",
    "joint_form_report",
    "survival_ratio",
    "survival_ratio_weak",
    "find_crossover",
]

MAX_MEASUREMENTS = 4
IMAG_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MeasurementSchedule:
    """Measurement times and the projector measured at each one.

    ``ops`` defaults to the vacuum projector at every time.
    """

    times: tuple
    ops: tuple = None

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not times:
            raise ValueError("schedule needs at least one time")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"schedule times must be strictly increasing: {times}")
        if len(times) - 1 > MAX_MEASUREMENTS:
            raise ValueError(f"at most {MAX_MEASUREMENTS} measurements after t₀")
        ops = self.ops
        if ops is None:
            ops = (wigner_rep("vacuum_projector"),) * len(times)
        if len(ops) != len(times):
            raise ValueError("one operator per time is required")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "ops", tuple(ops))

    def insertions(self, idempotent=False):
        """Operator string ``f₀† … f_n† f_n … f₀``.

        With ``idempotent`` the central pair ``f_n† f_n`` is replaced by
        ``f_n``, valid for projectors.
        """
        left = [Insertion(t, op.adjoint()) for t, op in zip(self.times, self.ops)]
        right = [Insertion(t, op) for t, op in zip(self.times, self.ops)][::-1]
        if idempotent:
            left = left[:-1]
        return left + right


@dataclass(frozen=True)
class SurvivalResult:
    """Survival ratio ``R = Pr(2,1|0)/Pr(2|0)`` at spacing ``tau``."""

    tau: float
    pr_210: float
    pr_20: float
    pr_0: float
    ratio: float
    method: str
    details: dict = field(default_factory=dict, compare=False)


def _real(value, schedule):
    if abs(value.imag) > IMAG_TOLERANCE * max(1.0, abs(value.real)):
        raise ValueError(f"joint quantity for schedule {schedule.times} has imaginary part "
                         f"{value.imag:.3g}")
    if value.real < -IMAG_TOLERANCE:
        raise ValueError(f"joint quantity for schedule {schedule.times} is negative")
    return max(value.real, 0.0)


def joint_quantity(schedule, cov, idempotent=False):
    """``<f₀† … f_n† f_n … f₀>`` in the Gibbs state.

    Parameters
    ----------
    schedule : MeasurementSchedule
    cov : OrderedCovariance
    idempotent : bool
        Use ``f_n† f_n = f_n`` to drop two integration variables.

    Raises
    ------
    GridError
        For off-grid times.
    DivergentIntegralError
        If the assembled form is not integrable.
    """
    try:
        val = string_expectation(schedule.insertions(idempotent), cov,
                                 context=f"measurement schedule {schedule.times}")
    except DivergentIntegralError as exc:
        raise DivergentIntegralError(exc.eigenvalue,
                                     f"measurement schedule {schedule.times}") from exc
    return _real(val, schedule)


def joint_form_report(schedule, cov):
    """Dimensions and numerical ranks of the general and reduced forms."""
    full = string_quadratic_form(schedule.insertions(False), cov)
    red = string_quadratic_form(schedule.insertions(True), cov)
    return dict(dimension=full.form.dimension, rank=full.rank,
                reduced_dimension=red.form.dimension, reduced_rank=red.rank)


def survival_ratio(tau, cov):
    """Exact ``R(τ)`` from the schedules ``(0, τ, 2τ)`` and ``(0, 2τ)``."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    s210 = MeasurementSchedule((0.0, tau, 2 * tau))
    s20 = MeasurementSchedule((0.0, 2 * tau))
    s0 = MeasurementSchedule((0.0,))
    p210 = joint_quantity(s210, cov)
    p20 = joint_quantity(s20, cov)
    p0 = joint_quantity(s0, cov)
    return SurvivalResult(float(tau), p210, p20, p0, p210 / p20, "exact",
                          details=joint_form_report(s210, cov))


def survival_ratio_weak(tau, bath, osc, quad):
    """``R_weak = exp[γ(2τ) - 2γ(τ)]`` from the O(η) coefficients.

    ``pr_210`` and ``pr_20`` hold the conditional probabilities
    ``exp[-2γ(τ)]`` and ``exp[-γ(2τ)]``; ``pr_0`` is 1.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    g1, g2 = zeno_exponent(bath, osc, np.array([tau, 2 * tau]), quad)
    p21 = float(np.exp(-2 * g1))
    p2 = float(np.exp(-g2))
    return SurvivalResult(float(tau), p21, p2, 1.0, float(np.exp(g2 - 2 * g1)), "weak_coupling")


def find_crossover(taus, ratios, level=1.0):
    """First ``τ`` where ``R - level`` changes sign, linearly interpolated.

    Returns ``None`` if there is no sign change.
    """
    taus = np.asarray(taus, dtype=float)
    d = np.asarray(ratios, dtype=float) - level
    hits = np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) <= 0)
    if hits.size == 0:
        return None
    i = hits[0]
    if d[i] == d[i + 1]:
        return float(taus[i])
    return float(taus[i] - d[i] * (taus[i + 1] - taus[i]) / (d[i + 1] - d[i]))
