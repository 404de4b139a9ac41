"""Monotone floor and threshold curves.

A crossing bound is stated for a pair of nondecreasing curves: a floor
curve ``f`` (the process is bounded below by ``-f(n)``) and a threshold
curve ``g``. This module provides the closed-form families used
throughout the package plus tabulated curves, with constructor-time
validation of the monotonicity constraints each family needs:

* ``Constant(c)``                  x -> c
* ``LogFloor(scale)``              x -> scale * ln(1 + x)
* ``QuadraticThreshold(a, b, f)``  x -> (a f(x) + b)^2 - f(x), needs 2ab >= 1
* ``ExpConcaveThreshold(h, f)``    x -> -1/h'(f(x)) - f(x) for a 1-exp-concave
                                   dampener h (e^{-h} concave, h -> 0 at infinity)
* ``LilThreshold(d)``              x -> u(fl(x)) - fl(x) with
                                   fl(x) = ln(1+x)/sqrt(2 pi) and
                                   u(y) = (e + y) ln^2(e + y) / d, 0 < d <= 1
* ``Tabulated(points)``            exact knot lookup, no interpolation

Curves are immutable and evaluate on scalars or numpy arrays.
"""

from __future__ import annotations

import abc
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ExtrapolationError, UnsupportedError

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

#: Scale of the logarithmic floor the LIL threshold is built on.
LIL_FLOOR_SCALE = 1.0 / SQRT_TWO_PI

# Dampener validity is probed on this grid at construction time:
# 256 logarithmically spaced points on [0, 1e8].
_EXP_CONCAVITY_GRID = np.concatenate([[0.0], np.geomspace(1e-8, 1e8, 255)])
_DECAY_PROBES = (1e5, 1e12)


def _as_array(x):
    arr = np.asarray(x, dtype=np.float64)
    return arr, (arr.ndim == 0)


def _lil_u(y, d):
    """u(y) = (e + y) ln^2(e + y) / d, the dampener-induced map for the LIL family."""
    ln = np.log(np.e + y)
    return (np.e + y) * ln * ln / d


def _lil_u_prime(y, d):
    ln = np.log(np.e + y)
    return (ln * ln + 2.0 * ln) / d


# ---------------------------------------------------------------------------
# Dampeners
# ---------------------------------------------------------------------------


class Dampener(abc.ABC):
    """Twice-differentiable h with e^{-h} concave and h(xi) -> 0 as xi -> inf.

    The induced threshold is g(t) = -1/h'(f(t)) - f(t); 1-exp-concavity
    (h'^2 <= h'') is exactly what makes that threshold nondecreasing.
    """

    @abc.abstractmethod
    def h(self, xi):
        ...

    @abc.abstractmethod
    def h_prime(self, xi):
        ...

    @abc.abstractmethod
    def h_double_prime(self, xi):
        ...

    @abc.abstractmethod
    def with_initial_value(self, target: float) -> "Dampener":
        """Return a same-family dampener with h(0) == target."""

    def _validate_shape(self) -> None:
        xi = _EXP_CONCAVITY_GRID
        hp = np.asarray(self.h_prime(xi))
        hpp = np.asarray(self.h_double_prime(xi))
        bad = hp * hp > hpp * (1.0 + 1e-12) + 1e-300
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValueError(
                f"{type(self).__name__} is not 1-exp-concave: h'(xi)^2 > h''(xi) "
                f"at xi={xi[i]:g}"
            )
        h0 = float(self.h(0.0))
        for probe in _DECAY_PROBES:
            hv = float(self.h(probe))
            if not (0.0 < hv < h0):
                raise ValueError(
                    f"{type(self).__name__} does not decay toward 0: "
                    f"h({probe:g})={hv:g} vs h(0)={h0:g}"
                )

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PolynomialDampener(Dampener):
    """h(xi) = (a xi + b)^{1-c} / (a (c - 1)) with c > 1, a, b > 0 and ac >= b^{1-c}."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0 and self.c > 1.0):
            raise ValueError("PolynomialDampener needs a > 0, b > 0, c > 1")
        if self.a * self.c < self.b ** (1.0 - self.c) * (1.0 - 1e-12):
            raise ValueError(
                "PolynomialDampener violates a*c >= b^(1-c); not exp-concave"
            )
        self._validate_shape()

    def h(self, xi):
        return (self.a * xi + self.b) ** (1.0 - self.c) / (self.a * (self.c - 1.0))

    def h_prime(self, xi):
        return -((self.a * xi + self.b) ** (-self.c))

    def h_double_prime(self, xi):
        return self.a * self.c * (self.a * xi + self.b) ** (-self.c - 1.0)

    def with_initial_value(self, target: float) -> "PolynomialDampener":
        # h(0) = b^{1-c}/(a(c-1)); keep b and c, solve for a.
        a_new = self.b ** (1.0 - self.c) / (target * (self.c - 1.0))
        return PolynomialDampener(a_new, self.b, self.c)

    def to_spec(self) -> dict:
        return {"kind": "Polynomial", "params": {"a": self.a, "b": self.b, "c": self.c}}


@dataclass(frozen=True)
class FatTailDampener(Dampener):
    """h(xi) = ln(a xi + b)^{1-c} with a > 0, b >= e, c > 1.

    Decays like an iterated logarithm; the induced threshold grows as
    f (ln f)^c, the slowest superlinear growth in the family zoo here.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a > 0.0 and self.c > 1.0):
            raise ValueError("FatTailDampener needs a > 0, c > 1")
        if self.b < math.e * (1.0 - 1e-12):
            raise ValueError("FatTailDampener needs b >= e")
        self._validate_shape()

    def h(self, xi):
        return np.log(self.a * xi + self.b) ** (1.0 - self.c)

    def h_prime(self, xi):
        w = self.a * xi + self.b
        return (1.0 - self.c) * np.log(w) ** (-self.c) * self.a / w

    def h_double_prime(self, xi):
        w = self.a * xi + self.b
        ln = np.log(w)
        return (self.c - 1.0) * (self.a / w) ** 2 * ln ** (-self.c - 1.0) * (self.c + ln)

    def with_initial_value(self, target: float) -> "FatTailDampener":
        # h(0) = ln(b)^{1-c}; keep a and c, solve for b.
        ln_b = target ** (-1.0 / (self.c - 1.0))
        return FatTailDampener(self.a, math.exp(ln_b), self.c)

    def to_spec(self) -> dict:
        return {"kind": "FatTail", "params": {"a": self.a, "b": self.b, "c": self.c}}


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------


class Curve(abc.ABC):
    """Nondecreasing function on [0, domain_end]. Immutable and thread-safe."""

    @property
    def domain_end(self) -> float:
        return math.inf

    @property
    def closed_form(self) -> bool:
        return True

    def _check_domain(self, arr: np.ndarray) -> None:
        if np.any(arr < 0.0) or np.any(~np.isfinite(arr)):
            raise DomainError(f"{type(self).__name__} is defined on [0, inf) only")

    def value(self, x):
        arr, scalar = _as_array(x)
        self._check_domain(arr)
        out = self._value(arr)
        return float(out) if scalar else out

    __call__ = value

    def derivative(self, x):
        arr, scalar = _as_array(x)
        self._check_domain(arr)
        out = self._derivative(arr)
        return float(out) if scalar else out

    @abc.abstractmethod
    def _value(self, x: np.ndarray):
        ...

    def _derivative(self, x: np.ndarray):
        raise UnsupportedError(f"derivative is undefined for {type(self).__name__}")

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Curve):
    c: float

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ValueError("Constant level must be finite")

    def _value(self, x):
        return np.full_like(x, self.c)

    def _derivative(self, x):
        return np.zeros_like(x)

    def to_spec(self) -> dict:
        return {"kind": "Constant", "params": {"c": self.c}}


@dataclass(frozen=True)
class LogFloor(Curve):
    """scale * ln(1 + x); the canonical diverging floor."""

    scale: float

    def __post_init__(self):
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValueError("LogFloor scale must be positive")

    def _value(self, x):
        return self.scale * np.log1p(x)

    def _derivative(self, x):
        return self.scale / (1.0 + x)

    def to_spec(self) -> dict:
        return {"kind": "LogFloor", "params": {"scale": self.scale}}


@dataclass(frozen=True)
class QuadraticThreshold(Curve):
    """(a * base(x) + b)^2 - base(x).

    Nondecreasing iff 2ab >= 1 (the derivative in the base variable is
    2a(a xi + b) - 1 >= 2ab - 1); the constructor rejects smaller products.
    """

    a: float
    b: float
    base: Curve

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("QuadraticThreshold needs a > 0 and b > 0")
        if 2.0 * self.a * self.b < 1.0 - 1e-12:
            raise ValueError(
                f"QuadraticThreshold needs 2ab >= 1, got 2ab={2 * self.a * self.b:g}"
            )

    @property
    def domain_end(self) -> float:
        return self.base.domain_end

    @property
    def closed_form(self) -> bool:
        return self.base.closed_form

    def _value(self, x):
        xi = self.base._value(x)
        return (self.a * xi + self.b) ** 2 - xi

    def _derivative(self, x):
        xi = self.base._value(x)
        return (2.0 * self.a * (self.a * xi + self.b) - 1.0) * self.base._derivative(x)

    def to_spec(self) -> dict:
        return {
            "kind": "QuadraticThreshold",
            "params": {"a": self.a, "b": self.b, "base": self.base.to_spec()},
        }


@dataclass(frozen=True)
class ExpConcaveThreshold(Curve):
    """-1/h'(base(x)) - base(x) for a 1-exp-concave dampener h."""

    h: Dampener
    base: Curve

    @property
    def domain_end(self) -> float:
        return self.base.domain_end

    @property
    def closed_form(self) -> bool:
        return self.base.closed_form

    def _value(self, x):
        xi = self.base._value(x)
        return -1.0 / self.h.h_prime(xi) - xi

    def _derivative(self, x):
        xi = self.base._value(x)
        hp = self.h.h_prime(xi)
        return (self.h.h_double_prime(xi) / (hp * hp) - 1.0) * self.base._derivative(x)

    def to_spec(self) -> dict:
        return {
            "kind": "ExpConcaveThreshold",
            "params": {"h": self.h.to_spec(), "base": self.base.to_spec()},
        }


@dataclass(frozen=True)
class LilThreshold(Curve):
    """u(fl(x)) - fl(x) over the hard-coded floor fl(x) = ln(1+x)/sqrt(2 pi).

    With u(y) = (e + y) ln^2(e + y) / d and 0 < d <= 1 the threshold
    dominates the floor and is nondecreasing, and the crossing exponent
    integral evaluates to exactly d.
    """

    d: float

    def __post_init__(self):
        if not (0.0 < self.d <= 1.0):
            raise ValueError("LilThreshold needs 0 < d <= 1")

    def _value(self, x):
        fl = LIL_FLOOR_SCALE * np.log1p(x)
        return _lil_u(fl, self.d) - fl

    def _derivative(self, x):
        fl = LIL_FLOOR_SCALE * np.log1p(x)
        return (_lil_u_prime(fl, self.d) - 1.0) * LIL_FLOOR_SCALE / (1.0 + x)

    def to_spec(self) -> dict:
        return {"kind": "LilThreshold", "params": {"d": self.d}}


def lil_floor() -> LogFloor:
    """The floor curve matching LilThreshold: ln(1+x)/sqrt(2 pi)."""
    return LogFloor(LIL_FLOOR_SCALE)


@dataclass(frozen=True)
class Tabulated(Curve):
    """Curve given by knots (x, value), strictly increasing in x.

    Evaluation is exact knot lookup; querying between knots raises
    DomainError rather than inventing interpolated values. With
    ``extend=True`` the final value continues as a constant past the
    last knot (domain_end becomes infinite); otherwise queries beyond
    the table raise ExtrapolationError.
    """

    points: tuple
    extend: bool = False
    _xs: np.ndarray = field(init=False, repr=False, compare=False)
    _vals: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple((float(x), float(v)) for x, v in self.points)
        if len(pts) == 0:
            raise ValueError("Tabulated curve needs at least one point")
        xs = np.array([p[0] for p in pts])
        vals = np.array([p[1] for p in pts])
        if xs[0] < 0.0:
            raise ValueError("Tabulated knots must lie in [0, inf)")
        if len(xs) > 1 and np.any(np.diff(xs) <= 0.0):
            raise ValueError("Tabulated knots must be strictly increasing in x")
        if len(vals) > 1 and np.any(np.diff(vals) < 0.0):
            raise ValueError("Tabulated values must be nondecreasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_vals", vals)

    @property
    def domain_end(self) -> float:
        return math.inf if self.extend else float(self._xs[-1])

    @property
    def closed_form(self) -> bool:
        return False

    def _value(self, x):
        beyond = x > self._xs[-1]
        if np.any(beyond) and not self.extend:
            raise ExtrapolationError(
                f"query beyond tabulated range (last knot x={self._xs[-1]:g})"
            )
        if np.any(x < self._xs[0]):
            raise DomainError(f"query below first tabulated knot x={self._xs[0]:g}")
        idx = np.searchsorted(self._xs, np.minimum(x, self._xs[-1]))
        idx = np.minimum(idx, len(self._xs) - 1)
        exact = self._xs[idx] == np.minimum(x, self._xs[-1])
        if not np.all(exact | beyond):
            bad = np.atleast_1d(~(exact | beyond)).nonzero()[0]
            first = float(np.atleast_1d(x)[bad[0]])
            raise DomainError(
                f"x={first:g} is not a knot; tabulated curves are evaluated "
                "at knots only"
            )
        return self._vals[idx]

    def to_spec(self) -> dict:
        return {
            "kind": "Tabulated",
            "params": {"points": [[x, v] for x, v in self.points],
                       "extend": self.extend},
        }


def tabulated_from_csv(path, extend: bool = False) -> Tabulated:
    """Load a Tabulated curve from a CSV file with header ``x,value``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["x", "value"]:
            raise ValueError(f"{path}: expected CSV header 'x,value'")
        pts = [(float(row[0]), float(row[1])) for row in reader if row]
    return Tabulated(tuple(pts), extend=extend)


# ---------------------------------------------------------------------------
# JSON curve specifications: {"kind": ..., "params": {...}}
# ---------------------------------------------------------------------------

def dampener_from_spec(obj: dict) -> Dampener:
    kind = obj.get("kind")
    params = obj.get("params", {})
    if kind == "Polynomial":
        return PolynomialDampener(params["a"], params["b"], params["c"])
    if kind == "FatTail":
        return FatTailDampener(params["a"], params["b"], params["c"])
    raise ValueError(f"unknown dampener kind {kind!r}")


def curve_from_spec(obj) -> Curve:
    """Build a curve from its JSON specification (dict or JSON string)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("kind")
    params = obj.get("params", {})
    if kind == "Constant":
        return Constant(params["c"])
    if kind == "LogFloor":
        return LogFloor(params["scale"])
    if kind == "QuadraticThreshold":
        return QuadraticThreshold(params["a"], params["b"],
                                  curve_from_spec(params["base"]))
    if kind == "ExpConcaveThreshold":
        return ExpConcaveThreshold(dampener_from_spec(params["h"]),
                                   curve_from_spec(params["base"]))
    if kind == "LilThreshold":
        return LilThreshold(params["d"])
    if kind == "Tabulated":
        if "path" in params:
            return tabulated_from_csv(params["path"],
                                      extend=params.get("extend", False))
        pts = tuple((x, v) for x, v in params["points"])
        return Tabulated(pts, extend=params.get("extend", False))
    raise ValueError(f"unknown curve kind {kind!r}")
