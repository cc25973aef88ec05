"""Counter-based random streams keyed by (master seed, stream index).

A stream is a Philox-4x64 generator whose 128-bit key is
``(mix(master_seed), stream_index)`` and whose counter starts at zero. Distinct
keys give independent streams; the same key reproduces the same output
bit-for-bit, whatever thread or process evaluates it.
"""
from __future__ import annotations

import functools

import numpy as np

MASK64 = (1 << 64) - 1


@functools.lru_cache(maxsize=1024)
def mix_seed(master_seed: int) -> int:
    """Hash a user seed into a well-spread 64-bit key word."""
    ss = np.random.SeedSequence(int(master_seed) & MASK64)
    return int(ss.generate_state(1, np.uint64)[0])


def derive_seed(master_seed: int, *tags) -> int:
    """Derive a child master seed from a parent seed and hashable tags.

    Used to give separate experiment arms (e.g. the Wishart and Gaussian
    sides of a comparison) non-overlapping families of streams.
    """
    words = [int(master_seed) & MASK64]
    for tag in tags:
        if isinstance(tag, str):
            words.extend(tag.encode())
        else:
            words.append(int(tag) & MASK64)
    ss = np.random.SeedSequence(words)
    return int(ss.generate_state(1, np.uint64)[0])


class RngStream:
    """One reproducible stream; ``generator`` is a :class:`numpy.random.Generator`."""

    __slots__ = ("master_seed", "stream_index", "_bitgen", "generator", "_state")

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        key = np.array([mix_seed(self.master_seed), self.stream_index & MASK64], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)
        self.generator = np.random.Generator(self._bitgen)
        self._state = None

    def seek(self, stream_index: int) -> "RngStream":
        """Rebind this object to ``stream_index`` of the same master seed, counter reset.

        Equivalent to ``RngStream(master_seed, stream_index)`` but reuses the
        underlying objects, which matters when streaming millions of replicas.
        """
        if self._state is None:
            self._state = self._bitgen.state
        st = self._state
        st["state"]["counter"][:] = 0
        st["state"]["key"][0] = mix_seed(self.master_seed)
        st["state"]["key"][1] = int(stream_index) & MASK64
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        self.stream_index = int(stream_index)
        return self

    @property
    def counter(self) -> np.ndarray:
        return self._bitgen.state["state"]["counter"].copy()

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"
