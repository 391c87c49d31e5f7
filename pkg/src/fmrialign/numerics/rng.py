"""Deterministic random streams on a counter-based generator.

Philox is counter-based, so a (seed, stream) pair fully determines the output
sequence on every platform. Child streams are derived by hashing a label, which
keeps independently consumed streams order-independent.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

ALGORITHM = "philox4x64"

_MASK64 = (1 << 64) - 1


def _label_to_stream(parent_stream: int, label) -> int:
    digest = hashlib.blake2b(
        f"{parent_stream}/{label}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream."""

    seed: int
    stream: int = 0
    algorithm: str = ALGORITHM

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, label) -> "RngStream":
        """Derive an independent stream from a label (string or int)."""
        new_stream = _label_to_stream(self.stream, label)
        return RngStream(seed=self.seed, stream=new_stream, algorithm=self.algorithm)
