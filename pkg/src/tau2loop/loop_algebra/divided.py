"""Divided powers of the boundary coefficients B_L, B_1, C_0, C_{L-1}.

At a root of unity B^k / [k]! is 0/0 once k >= N, so divided powers are defined
through composition sums: for 0 <= nu_m <= N-1 with sum nu_m = k,

    x0minus   prod_m  f_m^nu_m/[nu_m]!  Z_m^(nu_{m+1} + ... + nu_L)
    x1minus   prod_m  w^((L-m) nu_m) f_m^nu_m/[nu_m]!  Z_m^(nu_1 + ... + nu_{m-1})
    x0plus    prod_m  w^((m-1) nu_m) Z_m^(nu_{m+1} + ... + nu_L)  e_m^nu_m/[nu_m]!
    xm1plus   prod_m  Z_m^(nu_1 + ... + nu_{m-1})  e_m^nu_m/[nu_m]!

which equal (B/(1-w))^k / [k]! whenever k < N. Site factors are Gaussian
binomials, so every entry lies in Z[w]. The generic-q oracle at the bottom
recomputes B^k/[k]!_q with q an indeterminate and checks these sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .. import kernels
from ..exact_arith import _int_poly_divexact, get_context
from ..sparse import SparseOp
from ..state_space import LatticeConfig, sector_basis, sector_index

GenLabel = Literal["x0minus", "x1minus", "x0plus", "xm1plus"]
GEN_LABELS: tuple[str, ...] = ("x0minus", "x1minus", "x0plus", "xm1plus")

# boundary coefficient each label is built from
BOUNDARY_OF = {"x0minus": "BL", "x1minus": "B1", "x0plus": "C0", "xm1plus": "CL1"}


@dataclass(frozen=True)
class _Kind:
    raising: bool
    suffix: bool
    weight: str  # "none", "L-m" or "m-1"


_KINDS = {
    "x0minus": _Kind(True, True, "none"),
    "x1minus": _Kind(True, False, "L-m"),
    "x0plus": _Kind(False, True, "m-1"),
    "xm1plus": _Kind(False, False, "none"),
}


def _check_label(label: str) -> _Kind:
    try:
        return _KINDS[label]
    except KeyError:
        raise ValueError(f"unknown generator {label!r}; expected one of {GEN_LABELS}") from None


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int) -> tuple[int, ...]:
    """Coefficients (in q, constant first) of the Gaussian binomial [n choose k]_q."""
    if k < 0 or k > n:
        return (0,)
    if k == 0 or k == n:
        return (1,)
    a = gaussian_binomial(n - 1, k - 1)
    b = gaussian_binomial(n - 1, k)
    out = [0] * max(len(a), len(b) + k)
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i + k] += c
    return tuple(out)


@lru_cache(maxsize=None)
def gauss_table(N: int, raising: bool) -> np.ndarray:
    """table[d, nu] = Gaussian binomial folded mod q^N - 1 (length-N cyclic vector).

    Raising: [d+nu choose nu], the factor of f^nu/[nu]! on |d>.
    Lowering: [d choose nu], the factor of e^nu/[nu]! on |d>.
    """
    out = np.zeros((N, N, N), dtype=np.int64)
    for d in range(N):
        for nu in range(N):
            top = d + nu if raising else d
            if raising and top > N - 1:
                continue
            for p, c in enumerate(gaussian_binomial(top, nu)):
                out[d, nu, p % N] += c
    out.setflags(write=False)
    return out


def _weights(kind: _Kind, N: int, L: int) -> np.ndarray:
    m = np.arange(1, L + 1, dtype=np.int64)
    if kind.weight == "L-m":
        return (L - m) % N
    if kind.weight == "m-1":
        return (m - 1) % N
    return np.zeros(L, dtype=np.int64)


def composition_sum(
    config: LatticeConfig,
    label: str,
    k: int,
    basis: np.ndarray | None = None,
) -> SparseOp:
    """The composition sum of total ``k`` for ``label`` (equal to (B/(1-w))^k/[k]! for k < N).

    ``basis`` selects input states (a charge sector, say); the output space is
    the sector the operator maps it into. ``None`` means the full edge space.
    """
    kind = _check_label(label)
    N, L = config.N, config.L
    ctx = get_context(N)
    if k < 0:
        raise ValueError("k must be non-negative")
    if basis is None:
        in_states = np.arange(config.dim, dtype=np.int64)
        out_pos = np.arange(config.dim, dtype=np.int64)
        out_dim = config.dim
    else:
        in_states = np.asarray(basis, dtype=np.int64)
        charges = config.charges[in_states]
        if len(in_states) and np.any(charges != charges[0]):
            raise ValueError("basis must lie in a single charge sector")
        c_in = int(charges[0]) if len(in_states) else 0
        c_out = (c_in + k) % N if kind.raising else (c_in - k) % N
        out_pos = sector_index(config, c_out)
        out_dim = config.sector_dim
    shape = (out_dim, len(in_states))
    comps = kernels.compositions(k, L, N - 1)
    if len(comps) == 0:
        return SparseOp.zeros(ctx, shape)
    digits = np.ascontiguousarray(config.digits[in_states])
    cols, ranks, cyc = kernels.divided_power_entries(
        N, digits, comps, gauss_table(N, kind.raising), kind.raising, kind.suffix, _weights(kind, N, L)
    )
    cols = np.asarray(cols)
    rows = out_pos[np.asarray(ranks)]
    packs = np.asarray(cyc) @ ctx.reduce_matrix
    return SparseOp.from_packs(ctx, shape, rows, cols, packs)


def boundary_divided_power(config: LatticeConfig, label: str, k: int, basis: np.ndarray | None = None) -> SparseOp:
    """B^(k) with the (1-w)^k normalization of the boundary coefficient itself.

    For k < N this is literally B^k/[k]!; for k >= N it is (1-w)^k times the
    composition sum.
    """
    ctx = get_context(config.N)
    return composition_sum(config, label, k, basis).scale((ctx.one - ctx.omega(1)) ** k)


def divided_power(label: str, n: int, config: LatticeConfig) -> SparseOp:
    """(x)^(n) on the charge-0 sector: the composition sum of total nN."""
    if not config.loop_ok:
        raise ValueError(f"L={config.L} is not a multiple of N={config.N}")
    if n < 0:
        raise ValueError("n must be non-negative")
    return composition_sum(config, label, n * config.N, sector_basis(config, 0))


# generic-q oracle

def _poly_from_int(value: int, bits: int) -> list[int]:
    """Balanced base-2^bits digits of ``value`` (Kronecker substitution inverse)."""
    out = []
    base = 1 << bits
    half = base >> 1
    while value:
        d = value & (base - 1)
        if d >= half:
            d -= base
        out.append(d)
        value = (value - d) >> bits
    return out or [0]


def _eval_poly(p, X: int) -> int:
    acc = 0
    for c in reversed(list(p)):
        acc = acc * X + c
    return acc


def _generic_entries(config: LatticeConfig, label: str, ev) -> np.ndarray:
    """Boundary coefficient with generic q; ``ev`` maps each q-polynomial factor to an integer."""
    N, L = config.N, config.L
    kind = _check_label(label)
    M = np.zeros((config.dim, config.dim), dtype=object)
    M[:, :] = 0
    digits = config.digits
    place = N ** np.arange(L - 1, -1, -1)
    one_minus_q = ev([1, -1])
    for col in range(config.dim):
        n = digits[col]
        for j in range(1, L + 1):
            d = int(n[j - 1])
            if kind.raising:
                if d == N - 1:
                    continue
                new, factor = d + 1, [1] * (d + 1)  # [d+1]_q
            else:
                if d == 0:
                    continue
                new, factor = d - 1, [1] * d  # [d]_q
            nn = n.copy()
            nn[j - 1] = new
            # a suffix-sum label comes from Z on the sites before j, and vice versa
            zsites = range(0, j - 1) if kind.suffix else range(j, L)
            zexp = int(sum(int(n[m]) for m in zsites))
            if kind.weight == "L-m":
                zexp += L - j
            elif kind.weight == "m-1":
                zexp += j - 1
            poly = [0] * zexp + factor
            row = int(nn @ place)
            M[row, col] += one_minus_q * ev(poly)
    return M


def divided_power_oracle(label: str, n: int, config: LatticeConfig, max_dim: int = 30) -> SparseOp:
    """B^(nN) = B^(nN)/[nN]!_q computed with q generic, then specialized to w.

    Entries are polynomials in q handled by Kronecker substitution q -> 2^bits;
    the division by [nN]!_q is checked to be exact polynomial division.
    The result lives on the full edge space; compare it with
    ``(1-w)^(nN) * composition_sum(label, nN)``.
    """
    if config.dim > max_dim:
        raise ValueError(f"oracle limited to N^L <= {max_dim}, got {config.dim}")
    ctx = get_context(config.N)
    k = n * config.N
    if k == 0:
        return SparseOp.identity(ctx, config.dim)
    # bound on the l1 norm of every coefficient polynomial of B^k
    absM = _generic_entries(config, label, lambda p: sum(abs(c) for c in p))
    bound = np.linalg.matrix_power(absM, k).max()
    bits = int(bound).bit_length() + 2
    X = 1 << bits
    M = _generic_entries(config, label, lambda p: _eval_poly(p, X))
    P = np.linalg.matrix_power(M, k)
    fact = np.array([1], dtype=object)
    for m in range(1, k + 1):
        fact = np.convolve(fact, np.ones(m, dtype=object))  # times [m]_q
    fact = [int(c) for c in fact]
    entries = {}
    for i, j in zip(*np.nonzero(P != 0)):
        poly = _poly_from_int(int(P[i, j]), bits)
        quot = _int_poly_divexact(poly + [0] * max(0, len(fact) - len(poly)), fact)
        entries[(int(i), int(j))] = ctx.element(quot)
    return SparseOp.from_dict(ctx, (config.dim, config.dim), entries)
