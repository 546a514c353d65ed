"""Seeded random streams.

Every random draw in the package goes through an :class:`RngStream`.  A stream
is identified by ``(master_seed, stream_index)`` and, optionally, a path of
child indices.  The bit generator is numpy's Philox-4x64 (a counter-based
generator), keyed through :class:`numpy.random.SeedSequence` with the stream
path as its ``spawn_key``.  Both algorithms are fixed by numpy and produce the
same output on every platform, so results depend only on the stream identity
and never on the order in which trials are executed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    stream_index: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if self.stream_index < 0 or any(i < 0 for i in self.path):
            raise ValueError("stream indices must be non-negative")

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(
            entropy=self.master_seed & _SEED_MASK,
            spawn_key=(self.stream_index, *self.path),
        )
        return np.random.Generator(np.random.Philox(seq))

    def child(self, index: int) -> "RngStream":
        """An independent sub-stream, e.g. one per retry or per trial."""
        return RngStream(self.master_seed, self.stream_index, (*self.path, index))
