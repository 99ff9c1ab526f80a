"""Counter-based random streams and block-buffered draw sources.

Every sampler derives its randomness from a Philox generator keyed by
``(seed, stream)``.  Philox is counter based, so distinct key pairs give
independent streams: replica r of experiment component c uses
``stream = substream(c, r)`` and Monte Carlo runs can be distributed over
any number of workers without changing a single draw.

The kernels (both the compiled and the pure Python backend) consume
exponential and uniform variates through the block-buffered sources below.
Blocks are drawn with a fixed size schedule, so the exact sequence of calls
into the underlying generator depends only on how many variates a kernel
consumes, never on which backend ran it.  That is what makes the two
backends bit-identical.
"""

import numpy as np

from gwexplore.errors import ValidationError

__all__ = [
    "BLOCK_SCHEDULE",
    "make_generator",
    "substream",
    "ExponentialSource",
    "UniformSource",
]

# Block sizes for successive refills; the last entry repeats forever.  Small
# leading blocks keep short paths cheap, 8192 amortizes the generator call
# for the long ones.
BLOCK_SCHEDULE = (256, 1024, 4096, 8192)

_MASK64 = (1 << 64) - 1


def make_generator(seed, stream=0):
    """Return a numpy Generator on the Philox stream keyed by (seed, stream)."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def substream(component, replica):
    """Stream id for a replica of a numbered experiment component.

    Components get disjoint 2**32-wide bands, so per-replica streams never
    collide across the different sample families inside one experiment.
    """
    if not 0 <= replica < (1 << 32):
        raise ValidationError("replica index out of range")
    return (component << 32) + replica


class _BlockSource:
    """Block-buffered scalar draws from a Generator.

    Subclasses fill the buffer with their distribution.  ``refill`` returns
    the fresh buffer so compiled kernels can grab it as a memoryview; they
    maintain their own cursor and write it back to ``pos`` when done, which
    keeps mixed consumption (kernel then Python, or two sources interleaved)
    coherent.
    """

    def __init__(self, rng):
        self.rng = rng
        self.buf = np.empty(0, dtype=np.float64)
        self.pos = 0
        self._block_index = 0

    def _draw(self, size):
        raise NotImplementedError

    def refill(self):
        i = self._block_index
        if i >= len(BLOCK_SCHEDULE):
            i = len(BLOCK_SCHEDULE) - 1
        self._block_index += 1
        self.buf = self._draw(BLOCK_SCHEDULE[i])
        self.pos = 0
        return self.buf

    def next(self):
        if self.pos >= self.buf.shape[0]:
            self.refill()
        v = self.buf[self.pos]
        self.pos += 1
        return v


class ExponentialSource(_BlockSource):
    """Standard exponential variates in blocks."""

    def _draw(self, size):
        return self.rng.standard_exponential(size)


class UniformSource(_BlockSource):
    """Uniform [0, 1) variates in blocks."""

    def _draw(self, size):
        return self.rng.random(size)
