from typing import List

import numpy as np
from loguru import logger

from services.errors import InvalidIntervalError

RNG_ALGORITHM = "PCG64"
RNG_NAME = f"numpy.random.{RNG_ALGORITHM}+SeedSequence (numpy {np.__version__})"

_U64_MASK = (1 << 64) - 1


class RandomStream:
    """
    Seeded, single-owner stream of uniform and standard Gaussian variates.

    Uniforms and Gaussians come from two generators spawned off the same seed
    sequence and are drawn in blocks, so the sequence of each kind depends only
    on how many of that kind were consumed before.
    """

    def __init__(self, seed: int, index: int = 0, block_size: int = 4096):
        self.seed = int(seed) & _U64_MASK
        self.index = int(index) & _U64_MASK
        self.block_size = block_size

        sequence = np.random.SeedSequence([self.seed, self.index])
        uniform_seq, gaussian_seq = sequence.spawn(2)
        self._generator = np.random.Generator(np.random.PCG64(uniform_seq))
        self._gaussian_generator = np.random.Generator(np.random.PCG64(gaussian_seq))

        self._uniforms: List[float] = []
        self._uniform_pos = 0
        self._gaussians: List[float] = []
        self._gaussian_pos = 0

    def _next_uniform(self) -> float:
        if self._uniform_pos >= len(self._uniforms):
            self._uniforms = self._generator.random(self.block_size).tolist()
            self._uniform_pos = 0
        value = self._uniforms[self._uniform_pos]
        self._uniform_pos += 1
        return value

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform variate on [lo, hi)"""
        if lo > hi:
            raise InvalidIntervalError(f"Invalid interval [{lo}, {hi})")
        if lo == hi:
            return lo

        value = lo + (hi - lo) * self._next_uniform()
        # rounding can land exactly on hi
        return value if value < hi else lo

    def gaussian(self) -> float:
        """Standard normal variate (ziggurat method, exact)"""
        if self._gaussian_pos >= len(self._gaussians):
            self._gaussians = self._gaussian_generator.standard_normal(self.block_size).tolist()
            self._gaussian_pos = 0
        value = self._gaussians[self._gaussian_pos]
        self._gaussian_pos += 1
        return value

    def raw(self, count: int) -> List[int]:
        """Raw 64-bit output of the uniform generator, bypassing the variate blocks"""
        return self._generator.bit_generator.random_raw(count).tolist()

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, index={self.index}, rng={RNG_ALGORITHM})"


def derive(seed: int, index: int) -> RandomStream:
    """Substream for one ensemble member; a pure function of (seed, index)"""
    stream = RandomStream(seed, index)
    logger.debug(f"Derived {stream}")
    return stream


def grid_index(length: int, rep: int) -> int:
    """Substream index for the (walk length, replicate) cell of an experiment grid"""
    return ((int(length) & 0xFFFFFFFF) << 32) | (int(rep) & 0xFFFFFFFF)
