"""Hierarchical reproducible random seeds.

A RandomSeed pairs a 64-bit root with a child-derivation path. Any worker
that derives its generator from the same (root, path) reproduces the same
stream, so parallel campaigns are deterministic regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

_MAX_ROOT = 2**64


@dataclass(frozen=True)
class RandomSeed:
    root: int
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.root, int) or not (0 <= self.root < _MAX_ROOT):
            raise DomainError(f"root seed must be a uint64, got {self.root!r}")
        if any((not isinstance(i, int)) or i < 0 for i in self.path):
            raise DomainError(f"path indices must be non-negative ints: {self.path!r}")

    def child(self, *indices: int) -> "RandomSeed":
        """Derive a child seed by appending indices to the path."""
        return RandomSeed(self.root, self.path + tuple(int(i) for i in indices))

    def generator(self) -> np.random.Generator:
        """Fresh generator for this (root, path); identical pairs yield identical streams."""
        return np.random.default_rng(np.random.SeedSequence(self.root, spawn_key=self.path))
