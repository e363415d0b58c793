"""Deterministic, splittable random streams.

Every stream is a Philox4x64 counter-based generator keyed by the user seed.
The stream identifier occupies the third counter word, so streams with
different identifiers walk disjoint blocks of 2**128 counter values and
never overlap. A stream is therefore a pure function of ``(seed, identifier)``.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _philox_state(seed: int, identifier: int) -> dict:
    return {
        "bit_generator": "Philox",
        "state": {
            "counter": np.array([0, 0, identifier, 0], dtype=np.uint64),
            "key": np.array([seed, 0], dtype=np.uint64),
        },
        "buffer": np.zeros(4, dtype=np.uint64),
        "buffer_pos": 4,
        "has_uint32": 0,
        "uinteger": 0,
    }


class RandomStream:
    """A reproducible stream of uniforms identified by ``(seed, identifier)``."""

    __slots__ = ("seed", "identifier", "_gen")

    def __init__(self, seed: int, identifier: int = 0):
        self.seed = int(seed) & _MASK64
        self.identifier = int(identifier) & _MASK64
        bitgen = np.random.Philox(key=self.seed)
        bitgen.state = _philox_state(self.seed, self.identifier)
        self._gen = np.random.Generator(bitgen)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, identifier={self.identifier})"

    def next_uniform(self) -> float:
        """Return one double in [0, 1) with 53-bit resolution."""
        return float(self._gen.random())

    def uniforms(self, size) -> np.ndarray:
        return self._gen.random(size)

    def derive(self, identifier: int) -> "RandomStream":
        """Substream sharing this stream's seed."""
        return RandomStream(self.seed, identifier)


def derive(seed: int, identifier: int) -> RandomStream:
    return RandomStream(seed, identifier)


def uniform_block(seed: int, start: int, count: int, n: int) -> np.ndarray:
    """Uniforms for replications ``start .. start+count-1``, one row each.

    Row ``r`` equals ``derive(seed, start + r).uniforms(n)`` bit for bit; a
    single bit generator is re-keyed per row to avoid object churn.
    """
    seed = int(seed) & _MASK64
    bitgen = np.random.Philox(key=seed)
    gen = np.random.Generator(bitgen)
    out = np.empty((count, n))
    for r in range(count):
        bitgen.state = _philox_state(seed, (start + r) & _MASK64)
        out[r] = gen.random(n)
    return out
