"""Edge-variable basis of (Z_N)^L, charge sectors and the two ground states."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class LatticeConfig:
    N: int
    L: int
    Q: int = 0

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if not 0 <= self.Q < self.N:
            raise ValueError(f"Q must lie in 0..{self.N - 1}, got {self.Q}")

    @property
    def dim(self) -> int:
        return self.N**self.L

    @property
    def sector_dim(self) -> int:
        return self.N ** (self.L - 1)

    @property
    def loop_ok(self) -> bool:
        """Loop-algebra constructions need N | L."""
        return self.L % self.N == 0

    @property
    def r(self) -> int:
        """Degree of the Drinfeld polynomial, (N-1)L/N."""
        if not self.loop_ok:
            raise ValueError(f"L={self.L} is not a multiple of N={self.N}")
        return (self.N - 1) * self.L // self.N

    def with_Q(self, Q: int) -> "LatticeConfig":
        return LatticeConfig(self.N, self.L, Q)

    @cached_property
    def digits(self) -> np.ndarray:
        """digits[i, j] = n_{j+1} of the state with rank i (n_1 most significant)."""
        ranks = np.arange(self.dim, dtype=np.int64)
        out = np.empty((self.dim, self.L), dtype=np.int64)
        for j in range(self.L - 1, -1, -1):
            out[:, j] = ranks % self.N
            ranks //= self.N
        return out

    @cached_property
    def charges(self) -> np.ndarray:
        return self.digits.sum(axis=1) % self.N


@dataclass(frozen=True)
class EdgeState:
    n: tuple[int, ...]

    def __init__(self, n: Sequence[int]) -> None:
        object.__setattr__(self, "n", tuple(int(v) for v in n))


def rank(state: EdgeState | Sequence[int], config: LatticeConfig) -> int:
    n = state.n if isinstance(state, EdgeState) else tuple(state)
    if len(n) != config.L:
        raise ValueError(f"state has {len(n)} edges, expected L={config.L}")
    out = 0
    for v in n:
        if not 0 <= v < config.N:
            raise ValueError(f"edge value {v} outside 0..{config.N - 1}")
        out = out * config.N + v
    return out


def unrank(i: int, config: LatticeConfig) -> EdgeState:
    if not 0 <= i < config.dim:
        raise IndexError(f"rank {i} outside [0, {config.dim})")
    n = []
    for _ in range(config.L):
        i, d = divmod(i, config.N)
        n.append(d)
    return EdgeState(n[::-1])


def charge(state: EdgeState | Sequence[int], N: int) -> int:
    n = state.n if isinstance(state, EdgeState) else state
    return sum(n) % N


def sector_basis(config: LatticeConfig, c: int = 0) -> np.ndarray:
    """Ascending ranks of all states of charge ``c``; always N^(L-1) of them."""
    if not 0 <= c < config.N:
        raise ValueError(f"charge {c} outside 0..{config.N - 1}")
    return np.flatnonzero(config.charges == c).astype(np.int64)


def sector_index(config: LatticeConfig, c: int = 0) -> np.ndarray:
    """Map rank -> position in sector_basis(c), -1 for states outside the sector."""
    idx = np.full(config.dim, -1, dtype=np.int64)
    basis = sector_basis(config, c)
    idx[basis] = np.arange(len(basis))
    return idx


def ground_states(config: LatticeConfig) -> tuple[int, int]:
    """Ranks of |Omega> = (0,...,0) and |Omega-bar> = (N-1,...,N-1)."""
    return 0, config.dim - 1
