"""Improper integral of f'(t)/(g(t) + f(t)) over [start, inf).

This exponent drives both the continuous crossing bound and the
tail-completion of truncated infinite products. The integrand is
invariant under reparameterizing time by any increasing bijection, so
whenever the floor is a LogFloor we substitute xi = f(t) and integrate
1/(G(xi) + xi) in the base variable instead. That pulls the infinite
time horizon into a range where geometric quadrature windows converge,
makes slow (logarithmic) divergences actually reach the divergence
cutoff, and exposes closed-form tails for threshold families built on
the same floor:

    quadratic (a xi + b)^2        tail  1/(a (a Xi + b))
    exp-concave  -1/h'(xi)        tail  h(Xi)
    LIL          u(xi)            tail  d / ln(e + Xi)

When the threshold is constant or grows only linearly in the base
variable while the floor diverges, the integral diverges; this is
detected structurally and, as a backstop, whenever the accumulated
partial integral exceeds DIVERGENCE_CUTOFF (= 50; e^{-50} < 1e-21, so
the resulting bound is numerically 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .curves import (
    Constant,
    Curve,
    ExpConcaveThreshold,
    LilThreshold,
    LogFloor,
    QuadraticThreshold,
    LIL_FLOOR_SCALE,
    _lil_u,
)
from .errors import UnsupportedError

#: Partial integral above which the exponent is declared divergent.
DIVERGENCE_CUTOFF = 50.0

#: Switch point from numeric windows to the analytic tail, in the base variable.
TAIL_SWITCH = 1e12

_QUAD_OPTS = dict(epsabs=1e-15, epsrel=1e-13, limit=200)


@dataclass(frozen=True)
class ExponentIntegral:
    """Bracketed value of the exponent integral.

    The true integral lies in [value - error_bound, value + error_bound];
    ``value + error_bound`` is therefore a certified upper bound, which is
    what product tail-completion needs. ``divergent`` marks integrals that
    are infinite (structurally, or past the runaway cutoff).
    """

    value: float
    divergent: bool
    error_bound: float = 0.0

    @property
    def upper(self) -> float:
        return math.inf if self.divergent else self.value + self.error_bound


_DIVERGENT = ExponentIntegral(math.inf, True)
_ZERO = ExponentIntegral(0.0, False, 0.0)


def _reduce_base(curve: Curve, f: LogFloor):
    """Express ``curve`` as r * xi in f's base variable, or None."""
    if curve == f:
        return 1.0
    if isinstance(curve, LogFloor):
        return curve.scale / f.scale
    return None


def _reduce_threshold(g: Curve, f: LogFloor):
    """Return (D, tail, residue) with D(xi) = g(t(xi)) + xi vectorized and
    ``tail(Xi)`` a certified upper bound on the integral of 1/D beyond Xi
    (None when g stays bounded or linear, i.e. the integral diverges).
    ``residue`` is the coefficient of the linear leftover xi - base(xi);
    zero means the tail is exact, otherwise it carries a factor 2 valid
    once the superlinear part dominates twice the leftover."""
    if isinstance(g, Constant):
        c = g.c
        return (lambda xi: c + xi), None, 0.0
    if isinstance(g, LogFloor):
        r = g.scale / f.scale
        return (lambda xi: (r + 1.0) * xi), None, 0.0
    if isinstance(g, QuadraticThreshold):
        r = _reduce_base(g.base, f)
        if r is None:
            return None
        a, b = g.a, g.b
        if r == 1.0:
            # the -base and +xi terms cancel exactly
            return (lambda xi: (a * xi + b) ** 2,
                    lambda Xi: 1.0 / (a * (a * Xi + b)), 0.0)
        return (lambda xi: (a * r * xi + b) ** 2 + (1.0 - r) * xi,
                lambda Xi: 2.0 / (a * r * (a * r * Xi + b)), 1.0 - r)
    if isinstance(g, ExpConcaveThreshold):
        r = _reduce_base(g.base, f)
        if r is None:
            return None
        h = g.h
        if r == 1.0:
            return (lambda xi: -1.0 / h.h_prime(xi),
                    lambda Xi: float(h.h(Xi)), 0.0)
        return (lambda xi: -1.0 / h.h_prime(r * xi) + (1.0 - r) * xi,
                lambda Xi: 2.0 * float(h.h(r * Xi)) / r, 1.0 - r)
    if isinstance(g, LilThreshold):
        r = LIL_FLOOR_SCALE / f.scale
        d = g.d
        if r == 1.0:
            return (lambda xi: _lil_u(xi, d),
                    lambda Xi: d / math.log(math.e + Xi), 0.0)
        return (lambda xi: _lil_u(r * xi, d) + (1.0 - r) * xi,
                lambda Xi: 2.0 * d / (r * math.log(math.e + r * Xi)), 1.0 - r)
    return None


def _windowed(den, lo: float, hi: float):
    """Integrate 1/den over [lo, hi] in geometric windows.

    Returns (value, quad_error, diverged). Bails out as divergent as soon
    as the running total passes DIVERGENCE_CUTOFF.
    """
    total = 0.0
    err = 0.0
    a = lo
    width = max(lo, 1.0)
    while a < hi:
        b = min(a + width, hi)
        v, e = quad(lambda x: 1.0 / den(x), a, b, **_QUAD_OPTS)
        total += v
        err += e
        if total > DIVERGENCE_CUTOFF:
            return total, err, True
        a = b
        width *= 4.0
    return total, err, False


def _integrate_reduced(den, tail, residue: float, xi0: float) -> ExponentIntegral:
    d0 = float(den(xi0))
    if d0 < 0.0:
        raise UnsupportedError("threshold plus floor is negative; not a valid pair")
    if d0 == 0.0:
        # 1/D is non-integrable at the left edge for monotone pairs
        return _DIVERGENT
    if tail is None:
        # bounded/linear growth against a diverging floor: divergent.
        # Run the windows anyway so the reported cutoff is the numeric one.
        total, _, _ = _windowed(den, xi0, 1e200)
        return ExponentIntegral(math.inf, True)
    switch = max(TAIL_SWITCH, 100.0 * xi0)
    if residue != 0.0:
        # the factor-2 tail needs the superlinear part to dominate twice
        # the linear leftover from the switch point on (the ratio is
        # increasing for every family here, so one check suffices)
        while float(den(switch)) - residue * switch < 4.0 * abs(residue) * switch:
            switch *= 100.0
            if switch > 1e40:
                raise UnsupportedError(
                    "cannot certify the exponent tail for this curve pair"
                )
    value, err, diverged = _windowed(den, xi0, switch)
    if diverged:
        return _DIVERGENT
    t = float(tail(switch))
    if residue == 0.0:
        return ExponentIntegral(value + t, False, err + 1e-13)
    # certified bracket [value, value + t]
    return ExponentIntegral(value + 0.5 * t, False, 0.5 * t + err + 1e-13)


def _integrate_time_domain(f: Curve, g: Curve, start: float) -> ExponentIntegral:
    """Fallback windowed quadrature in t for floors without a closed inverse."""
    def integrand(t):
        return f.derivative(t) / (g.value(t) + f.value(t))

    total = 0.0
    err = 0.0
    a = start
    width = 1.0
    while a < 1e15:
        b = a + width
        v, e = quad(integrand, a, b, **_QUAD_OPTS)
        total += v
        err += e
        if total > DIVERGENCE_CUTOFF:
            return _DIVERGENT
        if v < 1e-14 * (1.0 + total) and width > 1e6:
            return ExponentIntegral(total, False, err + v)
        a = b
        width *= 4.0
    # ran out of representable time without certifying the tail
    return ExponentIntegral(total, False, max(err, 0.05 * total))


def exponent_integral(f: Curve, g: Curve, start: float = 0.0,
                      probe: float | None = None) -> ExponentIntegral:
    """Integral of f'(t)/(g(t) + f(t)) dt over t in [start, inf).

    With ``probe`` given, integrates only up to the point where the floor
    reaches the value ``probe`` (i.e. over xi in [f(start), probe] in the
    base variable) with no tail completion; used to validate the
    closed-form tails against plain quadrature.
    """
    if not (f.closed_form and g.closed_form):
        raise UnsupportedError("exponent integral needs closed-form curves")
    if isinstance(f, Constant):
        return _ZERO
    if not isinstance(f, LogFloor):
        if probe is not None:
            raise UnsupportedError("probe truncation needs a LogFloor floor")
        return _integrate_time_domain(f, g, start)

    xi0 = f.value(start)
    reduced = _reduce_threshold(g, f)
    if reduced is None:
        return _integrate_time_domain(f, g, start)
    den, tail, residue = reduced
    if probe is not None:
        if probe <= xi0:
            return _ZERO
        d0 = float(den(xi0))
        if d0 == 0.0:
            return _DIVERGENT
        value, err, diverged = _windowed(den, xi0, probe)
        return ExponentIntegral(value, diverged, err)
    return _integrate_reduced(den, tail, residue, xi0)
