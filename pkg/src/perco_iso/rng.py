"""Counter-based random streams for reproducible, worker-independent sampling.

Samples are grouped into fixed-size blocks.  Block ``b`` of a run seeded
with ``seed`` draws from a Philox generator keyed by ``(seed, b)``; within
a block the uniforms are laid out sample-major, one column per edge.  Any
partition of blocks over workers therefore produces the same numbers.
"""

from __future__ import annotations

import numpy as np

BLOCK_SIZE = 8192
_MASK64 = (1 << 64) - 1


def block_generator(seed: int, block: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, block & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def block_uniforms(seed: int, block: int, n_samples: int, n_edges: int) -> np.ndarray:
    """Uniforms of shape (n_samples, n_edges) for one block."""
    return block_generator(seed, block).random((n_samples, n_edges))


def block_ranges(samples: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    """(block index, number of samples in it) covering ``samples`` samples."""
    out = []
    b = 0
    left = samples
    while left > 0:
        k = min(block_size, left)
        out.append((b, k))
        left -= k
        b += 1
    return out
