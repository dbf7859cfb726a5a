"""Per-configuration cache of the exact objects the checks share."""

from __future__ import annotations

import os
from functools import cached_property

import numpy as np

from ..exact_arith import get_context
from ..sparse import SparseOp, StateVector
from ..state_space import LatticeConfig, ground_states, sector_basis
from ..transfer_ops import MonodromyBlocks, OpPoly, cached_operator, monodromy
from .divided import boundary_divided_power, divided_power
from .generators import LoopGenerators, base_generators, extend_generators, lambda_coefficients


class Workspace:
    """Lazily built operators for one (N, L), reused across checks.

    With ``cache_dir`` set, the base divided powers are read from and written
    to the on-disk operator cache.
    """

    def __init__(self, config: LatticeConfig, cache_dir: str | os.PathLike | None = None) -> None:
        self.config = config.with_Q(0)
        self.cache_dir = cache_dir
        self.ctx = get_context(config.N)
        self._dp: dict[tuple[str, int], SparseOp] = {}
        self._bdp: dict[tuple[str, int], SparseOp] = {}
        self._gens: LoopGenerators | None = None
        self._extended_to = -1

    @cached_property
    def sector(self) -> np.ndarray:
        return sector_basis(self.config, 0)

    @cached_property
    def omega_pos(self) -> tuple[int, int]:
        """Positions of |Omega> and |Omega-bar> inside the charge-0 sector."""
        lo, hi = ground_states(self.config)
        pos = np.searchsorted(self.sector, [lo, hi])
        if self.sector[pos[1]] != hi:
            raise ValueError("|Omega-bar> is not in the charge-0 sector")
        return int(pos[0]), int(pos[1])

    def omega(self) -> StateVector:
        return StateVector.basis(self.ctx, len(self.sector), self.omega_pos[0])

    def omega_bar(self) -> StateVector:
        return StateVector.basis(self.ctx, len(self.sector), self.omega_pos[1])

    def basis_vector(self, pos: int) -> StateVector:
        return StateVector.basis(self.ctx, len(self.sector), pos)

    def dp(self, label: str, n: int) -> SparseOp:
        """(x)^(n) on the charge-0 sector."""
        key = (label, n)
        if key not in self._dp:
            if n == 1:
                self._dp[key] = cached_operator(
                    self.cache_dir, self.config, f"{label}_1", lambda: divided_power(label, 1, self.config)
                )
            else:
                self._dp[key] = divided_power(label, n, self.config)
        return self._dp[key]

    def boundary_dp(self, label: str, k: int) -> SparseOp:
        """B^(k) on the full edge space, (1-w)^k normalization."""
        key = (label, k)
        if key not in self._bdp:
            self._bdp[key] = boundary_divided_power(self.config, label, k)
        return self._bdp[key]

    @property
    def gens(self) -> LoopGenerators:
        if self._gens is None:
            labels = ("x0minus", "x1minus", "x0plus", "xm1plus")
            self._gens = base_generators(self.config, {lab: self.dp(lab, 1) for lab in labels})
        return self._gens

    def extended(self, j_max: int) -> LoopGenerators:
        g = self.gens
        if j_max > self._extended_to:
            extend_generators(g, j_max)
            self._extended_to = j_max
        return g

    @cached_property
    def lambdas(self) -> tuple[int, ...]:
        return lambda_coefficients(self.config).lambdas

    @cached_property
    def blocks(self) -> MonodromyBlocks:
        return monodromy(self.config)

    def tau2(self, Q: int = 0) -> OpPoly:
        return self.blocks.A + self.blocks.D.scale(self.ctx.omega(-Q))
