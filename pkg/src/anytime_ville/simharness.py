"""Monte Carlo validation harnesses: envelope coverage and martingale drift.

Coverage streams centered normal draws, tracks the running sum, and
counts trajectories that ever escape the time-uniform envelope; the
observed violation rate must stay below the nominal level. Draws are
indexed per (repetition, step) through a counter-based generator, so
reports are bit-identical across thread counts and common random numbers
across confidence levels come for free (same seed, same draws).
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import InvalidQuery
from .lil import LilParams, explicit_bound, i_fast
from .curves import LIL_FLOOR_SCALE
from . import rng

_REP_CHUNK = 256  # repetitions per work unit; fixed so chunking is thread-invariant


@dataclass(frozen=True)
class CoverageConfig:
    """delta in (0, 3/5], kappa = 1 for standard normal draws, else
    ScaledNormal(kappa): draws N(0, kappa^2) checked against the
    kappa-rescaled envelope."""

    delta: float
    n_steps: int
    n_reps: int
    seed: int
    kappa: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.delta <= 0.6:
            raise InvalidQuery("delta must lie in (0, 3/5]")
        if self.n_steps < 0:
            raise InvalidQuery("n_steps must be nonnegative")
        if self.n_reps < 100:
            raise InvalidQuery("n_reps must be at least 100")
        if not self.kappa > 0.0:
            raise InvalidQuery("kappa must be positive")

    @property
    def distribution(self) -> str:
        return "StandardNormal" if self.kappa == 1.0 else f"ScaledNormal({self.kappa:g})"


@dataclass(frozen=True)
class CoverageReport:
    n_reps: int
    violations: int
    violation_rate: float
    first_violation_times: dict


def sum_envelope(delta: float, n_steps: int) -> np.ndarray:
    """Envelope for |S_n| of a 1-sub-Gaussian walk at n = 0..n_steps:
    sqrt(n+1) * explicit_bound(n)."""
    p = LilParams(delta)
    n = np.arange(n_steps + 1, dtype=np.float64)
    return np.sqrt(n + 1.0) * explicit_bound(n, p)


def prior_scaled_envelope(delta: float, kappa: float, n_steps: int) -> np.ndarray:
    """Alternative envelope kappa * F(n / kappa^2) from the kappa-wide
    mixture weight; valid for a 1-sub-Gaussian (standard normal) walk."""
    p = LilParams(delta)

    def envelope(n):
        return np.sqrt(np.asarray(n) + 1.0) * explicit_bound(n, p)

    from .lil import kappa_rescale

    return kappa_rescale(envelope, kappa)(np.arange(n_steps + 1, dtype=np.float64))


def run_coverage(cfg: CoverageConfig, threads: int = 1,
                 envelope: np.ndarray | None = None) -> CoverageReport:
    """Count repetitions whose running sum ever escapes the envelope.

    A repetition is violated if |S_n| > envelope(n) for any n <= n_steps.
    The first violating n per repetition is histogrammed. By default the
    envelope matches the draw scale: sqrt(n+1) * explicit_bound(n) for
    standard normals, kappa times that for ScaledNormal(kappa) draws
    (kappa-sub-Gaussian increments rescale the whole guarantee by kappa).
    An explicit ``envelope`` (in sum units, length n_steps + 1) overrides
    this, e.g. to check the kappa-wide-prior form against standard draws.
    """
    if cfg.n_steps == 0:
        return CoverageReport(cfg.n_reps, 0, 0.0, {})
    if envelope is None:
        envelope = cfg.kappa * sum_envelope(cfg.delta, cfg.n_steps)
    elif len(envelope) != cfg.n_steps + 1:
        raise InvalidQuery("envelope must have length n_steps + 1")
    envelope = np.asarray(envelope, dtype=np.float64)[1:]
    padded = rng.padded_length(cfg.n_steps)

    def scan_chunk(rep_start: int):
        n_rep = min(_REP_CHUNK, cfg.n_reps - rep_start)
        u = rng.uniform_stream(cfg.seed, rep_start * padded, n_rep * padded)
        z = ndtri(u.reshape(n_rep, padded)[:, : cfg.n_steps] + 2.0 ** -54)
        if cfg.kappa != 1.0:
            z *= cfg.kappa
        s = np.cumsum(z, axis=1)
        viol = np.abs(s) > envelope[None, :]
        hit = viol.any(axis=1)
        first = np.where(hit, viol.argmax(axis=1) + 1, 0)
        return int(hit.sum()), Counter(first[hit].tolist())

    starts = range(0, cfg.n_reps, _REP_CHUNK)
    total = 0
    hist: Counter = Counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for count, sub in pool.map(scan_chunk, starts):
                total += count
                hist.update(sub)
    else:
        for count, sub in map(scan_chunk, starts):
            total += count
            hist.update(sub)
    return CoverageReport(
        n_reps=cfg.n_reps,
        violations=total,
        violation_rate=total / cfg.n_reps,
        first_violation_times=dict(sorted(hist.items())),
    )


@dataclass(frozen=True)
class MartingaleCheckReport:
    n_paths: int
    n_steps: int
    floor_violations: int
    checked_steps: tuple
    drift_means: tuple
    drift_std_errors: tuple

    @property
    def max_drift_zscore(self) -> float:
        zs = [m / se for m, se in zip(self.drift_means, self.drift_std_errors) if se > 0]
        return max(zs) if zs else 0.0


def _checked_steps(n_steps: int) -> np.ndarray:
    dense = np.arange(0, min(10, n_steps))
    sparse = np.unique(np.geomspace(10, n_steps, 20).astype(np.int64)) - 1
    return np.unique(np.concatenate([dense, sparse[sparse < n_steps]]))


def run_martingale_check(n_paths: int, n_steps: int, seed: int) -> MartingaleCheckReport:
    """Simulate standard-normal streams and test the mixture supermartingale.

    Asserts the floor M_n >= -ln(1+n)/sqrt(2 pi) pathwise (equivalently
    I >= 0) and measures the one-step drift mean(M_{n+1} - M_n), which is
    zero for normal increments, at log-spaced checked steps.
    """
    if n_paths < 10 ** 4:
        raise InvalidQuery("martingale check needs n_paths >= 1e4")
    if n_steps < 1:
        raise InvalidQuery("n_steps must be >= 1")
    padded = rng.padded_length(n_steps)
    checked = _checked_steps(n_steps)
    floor = LIL_FLOOR_SCALE * np.log1p(np.arange(n_steps + 1, dtype=np.float64))
    sqrt_np1 = np.sqrt(np.arange(n_steps + 1, dtype=np.float64) + 1.0)

    floor_violations = 0
    d_sum = np.zeros(len(checked))
    d_sumsq = np.zeros(len(checked))
    for start in range(0, n_paths, _REP_CHUNK):
        n_chunk = min(_REP_CHUNK, n_paths - start)
        u = rng.uniform_stream(seed, start * padded, n_chunk * padded)
        z = ndtri(u.reshape(n_chunk, padded)[:, :n_steps] + 2.0 ** -54)
        s = np.concatenate([np.zeros((n_chunk, 1)), np.cumsum(z, axis=1)], axis=1)
        ivals = i_fast(s / sqrt_np1[None, :])
        floor_violations += int(np.sum(ivals < 0.0))
        m = ivals - floor[None, :]
        d = m[:, checked + 1] - m[:, checked]
        d_sum += d.sum(axis=0)
        d_sumsq += (d * d).sum(axis=0)

    means = d_sum / n_paths
    variances = np.maximum(d_sumsq / n_paths - means ** 2, 0.0)
    ses = np.sqrt(variances / n_paths)
    return MartingaleCheckReport(
        n_paths=n_paths,
        n_steps=n_steps,
        floor_violations=floor_violations,
        checked_steps=tuple(int(c) for c in checked),
        drift_means=tuple(float(v) for v in means),
        drift_std_errors=tuple(float(v) for v in ses),
    )
