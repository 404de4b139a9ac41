"""Independent oracles the tests check the library against.

Everything here is deliberately implemented from first principles
(finite differences, brute-force products in extended precision, plain
scipy quadrature of defining integrals, mpmath scalar evaluation) and
shares no code paths with the package.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.special import erf

SQRT2 = math.sqrt(2.0)


def central_difference(fn, x: float, h: float = 1e-5) -> float:
    """(fn(x+h) - fn(x-h)) / 2h with a step scaled to the argument."""
    step = h * max(1.0, abs(x))
    return (fn(x + step) - fn(x - step)) / (2.0 * step)


def brute_product_log(f, g, t_start: int, t_end: int) -> float:
    """Sum of ln(1 - (f(t+1)-f(t))/(g(t+1)+f(t+1))) for t in [t_start, t_end],
    term by term in 80-bit extended precision."""
    total = np.longdouble(0.0)
    chunk = 1 << 19
    for lo in range(t_start, t_end + 1, chunk):
        hi = min(lo + chunk - 1, t_end)
        t = np.arange(lo, hi + 2, dtype=np.longdouble)
        fv = np.asarray(f.value(t.astype(np.float64)), dtype=np.longdouble)
        gv = np.asarray(g.value(t[1:].astype(np.float64)), dtype=np.longdouble)
        p = np.diff(fv) / (gv + fv[1:])
        total += np.sum(np.log1p(-p))
    return float(total)


def mp_lil_jump_prob(n: int, d: str) -> float:
    """Floor-hugger jump probability for the LIL pair at time n, via mpmath."""
    with mp.workdps(40):
        scale = 1 / mp.sqrt(2 * mp.pi)
        d = mp.mpf(d)

        def floor(x):
            return scale * mp.log1p(x)

        def thresh(x):
            fl = floor(x)
            return (mp.e + fl) * mp.log(mp.e + fl) ** 2 / d - fl

        p = (floor(n + 1) - floor(n)) / (thresh(n + 1) + floor(n + 1))
        return float(p)


def mp_ell(x: str) -> float:
    with mp.workdps(40):
        xv = mp.mpf(x)
        y = xv * xv / 2
        return float(mp.sqrt((mp.e ** y - 1) ** 3 / (xv * xv * mp.e ** y)))


def mp_implicit_rhs(delta: str, n: int) -> float:
    with mp.workdps(40):
        dp = -mp.log(1 - mp.mpf(delta))
        y = mp.log(mp.mpf(n) + 1) / mp.sqrt(2 * mp.pi)
        return float((mp.e + y) / dp * mp.log(mp.e + y) ** 2)


def mp_explicit_bound(delta: str, n: int) -> float:
    """sqrt(2 ln(1+sqrt(2) tau)) + (tau - ell(xi))/ell'(xi) at
    xi = sqrt(2 ln(1+sqrt(2) tau)), all in mpmath."""
    with mp.workdps(40):
        dp = -mp.log(1 - mp.mpf(delta))
        y = mp.log(mp.mpf(n) + 1) / mp.sqrt(2 * mp.pi)
        tau = (mp.e + y) / dp * mp.log(mp.e + y) ** 2
        L = mp.log(1 + mp.sqrt(2) * tau)
        xi = mp.sqrt(2 * L)
        yy = xi * xi / 2
        ellv = mp.sqrt((mp.e ** yy - 1) ** 3 / (xi * xi * mp.e ** yy))
        ellp = (1 / xi ** 2 * mp.sqrt((mp.e ** yy - 1) / mp.e ** yy)
                * (mp.e ** yy * (xi * xi - 1) + xi * xi / 2 + 1))
        return float(xi + (tau - ellv) / ellp)


def quad_i_defining(x: float) -> float:
    """Plain quadrature of the defining integral of I, no shared code."""
    v, _ = quad(lambda u: math.exp(0.5 * u * u) * erf(u / SQRT2), 0.0, abs(x),
                epsabs=1e-14, epsrel=1e-13, limit=400)
    return v


def eta_mixture_quad(n: int, s_n: float) -> float:
    """Direct quadrature of the improper-mixture supermartingale

        (1/sqrt(2 pi)) int_R [exp(eta S_n - eta^2 n / 2) - 1]
                              e^{-eta^2/2} d eta / |eta|.

    Folded onto eta > 0 the integrand is
    [expm1(eta S - eta^2 n/2) + expm1(-eta S - eta^2 n/2)]/2 * e^{-eta^2/2}/eta,
    which vanishes linearly at 0. Integration runs to where both the
    exp hump and the Gaussian weight are below 1e-18.
    """
    def integrand(eta):
        a = eta * s_n
        b = 0.5 * eta * eta * n
        return (0.5 * (np.expm1(a - b) + np.expm1(-a - b))
                * np.exp(-0.5 * eta * eta) / eta)

    hump_end = (abs(s_n) + math.sqrt(s_n * s_n + 83.0 * (n + 1.0))) / (n + 1.0)
    eta_max = max(hump_end, 9.2)
    pts = [hump_end] if hump_end < eta_max else None
    v, _ = quad(integrand, 0.0, eta_max, epsabs=1e-13, epsrel=1e-11,
                limit=800, points=pts)
    return math.sqrt(2.0 / math.pi) * v
