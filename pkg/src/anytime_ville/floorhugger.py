"""Floor-hugger martingale: the worst case that makes the crossing bound tight.

The process starts at -f(0) (or, to realize an initial expectation m0,
randomizes between g(0) and -f(0) with weights chosen to hit the mean).
Sitting at the floor value -f(n), it either jumps to the threshold
g(n+1), absorbing there, or drops to -f(n+1). The martingale property
pins the jump probability:

    p_n = (f(n+1) - f(n)) / (g(n+1) + f(n+1)).

A path is fully described by its crossing time, so simulation samples
crossing times by inverting the floor-survival distribution with one
counter-based uniform per path. That keeps a million paths cheap and
the summary bit-identical across thread counts.

The auxiliary process

    K_n = 1 - (g(n) - M_n)/(g(n) + f(n)) * s(n)

with s(n) the no-hit probability from time n is a nonnegative
supermartingale taking the value 1 whenever M_n >= g(n); it is what
reduces the generalized bound to the classic constant-threshold one, and
``k_process`` evaluates it along simulated paths.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curves import Curve
from .errors import InvalidQuery
from .ville import BoundQuery, s_tail
from . import rng

_PATH_CHUNK = 1 << 16  # multiple of rng.BLOCK; fixed so chunking is thread-invariant


@dataclass(frozen=True)
class FloorHuggerConfig:
    f: Curve
    g: Curve
    m0: float
    horizon: int
    n_paths: int
    seed: int

    def __post_init__(self):
        BoundQuery(self.f, self.g, self.m0)
        if self.horizon < 1:
            raise InvalidQuery("horizon must be >= 1")
        if self.n_paths < 1:
            raise InvalidQuery("n_paths must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidQuery("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SimSummary:
    n_paths: int
    n_crossed: int
    empirical_prob: float
    std_error: float


@dataclass(frozen=True)
class PathRecord:
    """One trajectory: floor values up to absorption, then the threshold."""

    values: tuple
    crossed: bool
    crossing_time: int | None


def jump_prob(f: Curve, g: Curve, n):
    """p_n = (f(n+1) - f(n)) / (g(n+1) + f(n+1)); vectorized over n."""
    n_arr = np.asarray(n, dtype=np.float64)
    p = (f.value(n_arr + 1.0) - f.value(n_arr)) / (g.value(n_arr + 1.0) + f.value(n_arr + 1.0))
    return float(p) if np.ndim(n) == 0 else p


def floor_survival(f: Curve, g: Curve, horizon: int) -> np.ndarray:
    """S[k] = P(no jump before time k | started on the floor), k = 0..horizon."""
    p = jump_prob(f, g, np.arange(horizon, dtype=np.float64))
    out = np.empty(horizon + 1)
    out[0] = 1.0
    np.exp(np.cumsum(np.log1p(-p)), out=out[1:])
    return out


def _start_weight(cfg: FloorHuggerConfig) -> float:
    f0 = cfg.f.value(0.0)
    g0 = cfg.g.value(0.0)
    return (cfg.m0 + f0) / (g0 + f0)


def simulate(cfg: FloorHuggerConfig, threads: int = 1) -> SimSummary:
    """Monte Carlo estimate of the crossing probability within the horizon.

    Deterministic for a fixed seed at any thread count: path i consumes
    the stream value at index i, and aggregation is an integer sum.
    """
    w_top = _start_weight(cfg)
    surv = floor_survival(cfg.f, cfg.g, cfg.horizon)
    cross_by_horizon = 1.0 - surv[cfg.horizon]

    def count_chunk(start: int) -> int:
        count = min(_PATH_CHUNK, cfg.n_paths - start)
        u = rng.uniform_stream(cfg.seed, start, count)
        top = u < w_top
        v = (u - w_top) / (1.0 - w_top) if w_top < 1.0 else np.zeros_like(u)
        return int(np.sum(top | (v < cross_by_horizon)))

    starts = range(0, cfg.n_paths, _PATH_CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            n_crossed = sum(pool.map(count_chunk, starts))
    else:
        n_crossed = sum(count_chunk(s) for s in starts)

    p_hat = n_crossed / cfg.n_paths
    return SimSummary(
        n_paths=cfg.n_paths,
        n_crossed=n_crossed,
        empirical_prob=p_hat,
        std_error=math.sqrt(p_hat * (1.0 - p_hat) / cfg.n_paths),
    )


def sample_paths(cfg: FloorHuggerConfig, n: int | None = None) -> list[PathRecord]:
    """Materialize the first n paths (crossing times inverted, values rebuilt)."""
    n = cfg.n_paths if n is None else min(n, cfg.n_paths)
    w_top = _start_weight(cfg)
    surv = floor_survival(cfg.f, cfg.g, cfg.horizon)
    cross_cdf = 1.0 - surv  # cross_cdf[k] = P(crossed by time k | floor start)
    count = rng.padded_length(n)
    u = rng.uniform_stream(cfg.seed, 0, count)[:n]
    g0 = cfg.g.value(0.0)
    floor_vals = -cfg.f.value(np.arange(cfg.horizon + 1, dtype=np.float64))
    records = []
    for ui in u:
        if ui < w_top:
            records.append(PathRecord((g0,), True, 0))
            continue
        v = (ui - w_top) / (1.0 - w_top)
        t = int(np.searchsorted(cross_cdf, v, side="right"))
        if t <= cfg.horizon:
            vals = tuple(floor_vals[:t]) + (cfg.g.value(float(t)),)
            records.append(PathRecord(vals, True, t))
        else:
            records.append(PathRecord(tuple(floor_vals), False, None))
    return records


def s_values(f: Curve, g: Curve, horizon: int,
             tail_horizon: int | None = None) -> np.ndarray:
    """No-hit probabilities s(0..horizon) in one backward pass.

    Seeded at s(horizon) from the tail bracket midpoint, then unwound via
    the recurrence s(n) = (1 - p_n) s(n+1).
    """
    if tail_horizon is None:
        tail_horizon = max(2 * horizon, 10 ** 6)
    seed_bracket = s_tail(f, g, horizon, tail_horizon)
    s_h = seed_bracket.midpoint
    if horizon == 0:
        return np.array([s_h])
    p = jump_prob(f, g, np.arange(horizon, dtype=np.float64))
    logs = np.log1p(-p)
    # s[n] = s_h * prod_{t=n}^{horizon-1} (1 - p_t)
    rev = np.concatenate([np.cumsum(logs[::-1])[::-1], [0.0]])
    return s_h * np.exp(rev)


def k_process(path: PathRecord, f: Curve, g: Curve, horizon: int,
              s: np.ndarray | None = None) -> np.ndarray:
    """K_n = 1 - (g(n) - M_n)/(g(n) + f(n)) * s(n) along one path."""
    if s is None:
        s = s_values(f, g, horizon)
    m = np.asarray(path.values, dtype=np.float64)
    n = np.arange(len(m), dtype=np.float64)
    gv = g.value(n)
    fv = f.value(n)
    return 1.0 - (gv - m) / (gv + fv) * s[: len(m)]


def dump_paths_csv(path_file, cfg: FloorHuggerConfig,
                   records: list[PathRecord] | None = None) -> None:
    """Write path_id,n,M,K rows for every (sampled) path."""
    if records is None:
        records = sample_paths(cfg)
    s = s_values(cfg.f, cfg.g, cfg.horizon)
    with open(path_file, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path_id", "n", "M", "K"])
        for pid, rec in enumerate(records):
            ks = k_process(rec, cfg.f, cfg.g, cfg.horizon, s=s)
            for n, (m, k) in enumerate(zip(rec.values, ks)):
                writer.writerow([pid, n, f"{m:.17g}", f"{k:.17g}"])
