"""Counter-based random streams with stable per-index values.

Built on Philox: the draw at global index i is a pure function of
(seed, i), so any chunking of index ranges across threads reproduces the
same values. Chunk starts must be multiples of 4 (Philox advances its
counter in blocks of four 64-bit outputs).
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

BLOCK = 4

# Half-ulp offset mapping random() outputs k*2^-53 to (0, 1) so the
# normal inverse CDF never sees an exact 0.
_HALF_ULP = 2.0 ** -54


def uniform_stream(seed: int, start: int, count: int) -> np.ndarray:
    """Doubles at indices [start, start+count) of the (seed)-keyed stream."""
    if start % BLOCK != 0:
        raise ValueError(f"stream start must be a multiple of {BLOCK}")
    bitgen = Philox(key=seed)
    if start:
        bitgen.advance(start // BLOCK)
    return Generator(bitgen).random(count)


def normal_stream(seed: int, start: int, count: int) -> np.ndarray:
    """Standard normals via the inverse CDF, one uniform per draw."""
    return ndtri(uniform_stream(seed, start, count) + _HALF_ULP)


def padded_length(n: int) -> int:
    """Round n up to a multiple of the Philox block size."""
    return ((n + BLOCK - 1) // BLOCK) * BLOCK
