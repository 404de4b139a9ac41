"""Generalized threshold-crossing bounds for monotone floor/threshold pairs.

For a supermartingale bounded below by -f(n) with initial expectation m0
in [-f(0), g(0)], the probability of ever reaching the threshold g is at
most

    1 - (g(0) - m0)/(g(0) + f(0)) * prod_{n>=1} (g(n) + f(n-1))/(g(n) + f(n)).

The infinite product is certified by truncation: dropping factors (each
<= 1) raises the product, and the dropped tail is itself bounded below by
exp(-integral of f'/(g+f)) via the continuous comparison, giving a
two-sided ProbBracket. The continuous relaxation

    1 - (g(0) - m0)/(g(0) + f(0)) * exp(-int_0^inf f'(t)/(g(t)+f(t)) dt)

is evaluated by adaptive quadrature with closed-form tail completion and
an explicit divergence flag (a diverging integral means the bound
trivializes to 1, which happens exactly when g grows no faster than f).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import (
    Constant,
    Curve,
    Dampener,
    ExpConcaveThreshold,
    Tabulated,
)
from .errors import CalibrationError, InvalidQuery, UnsupportedError
from .integrals import exponent_integral

#: Default truncation horizon for the infinite product.
DEFAULT_HORIZON = 10 ** 6

_CHUNK = 1 << 20


@dataclass(frozen=True)
class ProbBracket:
    """Certified [lower, upper] interval for a probability."""

    lower: float
    upper: float
    truncation_horizon: int

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise InvalidQuery(
                f"invalid bracket [{self.lower}, {self.upper}]"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)


@dataclass(frozen=True)
class ContinuousBound:
    """Value of the continuous relaxation plus its divergence flag."""

    value: float
    divergent: bool


@dataclass(frozen=True)
class BoundQuery:
    """Crossing-bound query: curves, initial expectation, truncation horizon.

    ``m0`` defaults to -f(0) (the floor-hugger's canonical start);
    ``horizon=None`` means the infinite product is truncated at
    DEFAULT_HORIZON and completed by the tail integral.
    """

    f: Curve
    g: Curve
    m0: float | None = None
    horizon: int | None = None

    def __post_init__(self):
        f0 = self.f.value(0.0)
        g0 = self.g.value(0.0)
        if not -f0 < g0:
            raise InvalidQuery(
                f"need -f(0) < g(0); got -f(0)={-f0:g}, g(0)={g0:g}"
            )
        m0 = -f0 if self.m0 is None else self.m0
        if not (-f0 <= m0 <= g0):
            raise InvalidQuery(
                f"initial expectation m0={m0:g} outside [-f(0), g(0)] = "
                f"[{-f0:g}, {g0:g}]"
            )
        object.__setattr__(self, "m0", float(m0))
        if self.horizon is not None and self.horizon < 1:
            raise InvalidQuery("horizon must be a positive integer")


def log_survival_sum(f: Curve, g: Curve, t_start: int, t_end: int) -> float:
    """Sum over t in [t_start, t_end] of log1p(-p_t) with
    p_t = (f(t+1) - f(t)) / (g(t+1) + f(t+1)), accumulated in chunks."""
    if isinstance(f, Constant) or t_end < t_start:
        return 0.0
    total = 0.0
    for lo in range(t_start, t_end + 1, _CHUNK):
        hi = min(lo + _CHUNK - 1, t_end)
        t = np.arange(lo, hi + 2, dtype=np.float64)
        fv = f.value(t)
        gv = g.value(t[1:])
        p = np.diff(fv) / (gv + fv[1:])
        total += float(np.sum(np.log1p(-p)))
    return total


def _tail_product_lower(f: Curve, g: Curve, tail_start: int) -> float:
    """Certified lower bound on prod_{t >= tail_start} (1 - p_t).

    Returns exp(-upper bound of the tail exponent integral); 1.0 when the
    floor stops increasing, 0.0 when nothing can be certified.
    """
    if isinstance(f, Constant):
        return 1.0
    if isinstance(f, Tabulated):
        # all increments past the table vanish under constant extension
        if f.extend and f.points[-1][0] <= tail_start:
            return 1.0
        return 0.0
    if not (f.closed_form and g.closed_form):
        return 0.0
    tail = exponent_integral(f, g, start=float(tail_start))
    if tail.divergent:
        return 0.0
    return math.exp(-tail.upper)


def s_tail(f: Curve, g: Curve, n: int, horizon: int) -> ProbBracket:
    """Bracket the floor-hugger's no-hit probability from time n,

        s(n) = prod_{t=n}^inf (1 - (f(t+1)-f(t)) / (g(t+1)+f(t+1))).

    Upper bound: product truncated at t = horizon (omitted factors <= 1).
    Lower bound: truncated product times a certified lower bound on the
    omitted tail.
    """
    BoundQuery(f, g)
    if not horizon > n >= 0:
        raise InvalidQuery(f"need horizon > n >= 0, got n={n}, horizon={horizon}")
    logsum = log_survival_sum(f, g, n, horizon)
    upper = min(1.0, math.exp(logsum))
    lower = upper * _tail_product_lower(f, g, horizon + 1)
    return ProbBracket(lower, upper, horizon)


def crossing_bound(q: BoundQuery) -> ProbBracket:
    """Bracket for the threshold-crossing probability bound.

    The product in the bound runs over n >= 1 with factors
    (g(n)+f(n-1))/(g(n)+f(n)) = 1 - p_{n-1}, i.e. it equals s(0) after an
    index shift; it is truncated at n = q.horizon and tail-completed.
    """
    f, g = q.f, q.g
    horizon = DEFAULT_HORIZON if q.horizon is None else q.horizon
    f0 = f.value(0.0)
    g0 = g.value(0.0)
    lead = (g0 - q.m0) / (g0 + f0)
    logsum = log_survival_sum(f, g, 0, horizon - 1)
    prod_upper = min(1.0, math.exp(logsum))
    prod_lower = prod_upper * _tail_product_lower(f, g, horizon)
    return ProbBracket(
        lower=max(0.0, 1.0 - lead * prod_upper),
        upper=min(1.0, 1.0 - lead * prod_lower),
        truncation_horizon=horizon,
    )


def continuous_bound(f: Curve, g: Curve, m0: float | None = None) -> ContinuousBound:
    """Continuous relaxation 1 - (g(0)-m0)/(g(0)+f(0)) * exp(-E).

    E is the exponent integral; when it diverges (or the partial integral
    passes the runaway cutoff) the bound is exactly 1.0 with the
    ``divergent`` flag set. The degenerate pair -f(0) = g(0) is accepted
    here (the only admissible m0 is g(0) and the bound is trivially 1);
    it arises for thresholds proportional to a diverging floor.
    """
    if not (f.closed_form and g.closed_form):
        raise UnsupportedError("continuous bound needs closed-form curves")
    f0 = f.value(0.0)
    g0 = g.value(0.0)
    if -f0 > g0:
        raise InvalidQuery(f"need -f(0) <= g(0); got -f(0)={-f0:g}, g(0)={g0:g}")
    if m0 is None:
        m0 = -f0
    if not (-f0 <= m0 <= g0):
        raise InvalidQuery(
            f"initial expectation m0={m0:g} outside [-f(0), g(0)]"
        )
    exponent = exponent_integral(f, g)
    if exponent.divergent:
        return ContinuousBound(1.0, True)
    if g0 + f0 == 0.0:
        return ContinuousBound(1.0, True)
    lead = (g0 - m0) / (g0 + f0)
    return ContinuousBound(1.0 - lead * math.exp(-exponent.upper), False)


def calibrate_quadratic(delta: float, a: float) -> float:
    """Pick b so the quadratic-threshold continuous bound equals delta.

    The exponent integral for g = (a f + b)^2 - f evaluates to 1/(ab), so
    1 - e^{-1/(ab)} = delta requires ab = 1/(-ln(1-delta)). Monotonicity
    of the threshold needs 2ab >= 1, i.e. -ln(1-delta) <= 2.
    """
    if not 0.0 < delta < 1.0:
        raise CalibrationError("delta must lie in (0, 1)")
    if a <= 0.0:
        raise CalibrationError("a must be positive")
    delta_prime = -math.log1p(-delta)
    if delta_prime > 2.0 + 1e-12:
        raise CalibrationError(
            f"2ab >= 1 unattainable: -ln(1-delta)={delta_prime:g} > 2"
        )
    return 1.0 / (a * delta_prime)


def calibrate_expconcave(h: Dampener, delta: float) -> Dampener:
    """Rescale a dampener so that h(0) = -ln(1-delta).

    The induced exp-concave threshold then has continuous crossing bound
    exactly delta, since the exponent integral equals h(0).
    """
    if not 0.0 < delta < 1.0:
        raise CalibrationError("delta must lie in (0, 1)")
    target = -math.log1p(-delta)
    try:
        adjusted = h.with_initial_value(target)
    except ValueError as exc:
        raise CalibrationError(
            f"no valid {type(h).__name__} reaches h(0)={target:g}: {exc}"
        ) from exc
    achieved = float(adjusted.h(0.0))
    if not math.isclose(achieved, target, rel_tol=1e-12, abs_tol=1e-15):
        raise CalibrationError(
            f"calibration missed target: h(0)={achieved!r} vs {target!r}"
        )
    return adjusted


def calibrated_quadratic_threshold(delta: float, a: float, base: Curve):
    """Convenience: the delta-calibrated quadratic threshold over ``base``."""
    from .curves import QuadraticThreshold

    return QuadraticThreshold(a, calibrate_quadratic(delta, a), base)


def calibrated_expconcave_threshold(h: Dampener, delta: float, base: Curve):
    """Convenience: the delta-calibrated exp-concave threshold over ``base``."""
    return ExpConcaveThreshold(calibrate_expconcave(h, delta), base)
