#!/usr/bin/env python3
"""
Counter-based random streams for reproducible, order-independent sampling

Every stream is a Philox generator keyed by (seed, stream index). Element i of
a region always reads the i-th draw of its stream, so samples can be generated
in any order or on any number of threads and still agree bit for bit.
"""

from typing import Tuple

import numpy as np

MASK64 = (1 << 64) - 1


def streamKey(seed: int, stream: int = 0) -> Tuple[int, int]:
    """Philox key words for a (seed, stream) pair"""
    return (int(seed) & MASK64, int(stream) & MASK64)


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Fresh generator positioned at counter zero of the stream"""
    key = np.array(streamKey(seed, stream), dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def uniforms(seed: int, stream: int, size: int) -> np.ndarray:
    """Uniforms in [0, 1) indexed by element; draw i depends only on (seed, stream, i)"""
    return generator(seed, stream).random(size)


def bernoulli(seed: int, stream: int, size: int, p: float) -> np.ndarray:
    """Monotone-coupled Bernoulli(p) bits: open iff uniform < p"""
    return uniforms(seed, stream, size) < p
