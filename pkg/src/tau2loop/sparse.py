"""Exact sparse operators and vectors over Q(omega).

An operator with entries a_ij in Z[omega] is stored through the regular
representation: every entry becomes the phi x phi integer block of
multiplication by a_ij, so a (m x n) operator is an int64 scipy CSR matrix of
shape (m phi, n phi). Products, sums and commutators are then plain integer
sparse algebra. Rational entries share one positive integer denominator.

Every int64 operator product is preceded by a magnitude bound and raises
OverflowError instead of wrapping. Vectors fall back to Python integers.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping, Union

import numpy as np
import scipy.sparse as sp

from . import kernels
from .exact_arith import CycloContext, Cyclotomic

log = logging.getLogger(__name__)

INT64_LIMIT = 2**62
FLOAT_EXACT = 2**52
Scalar = Union[int, Fraction, Cyclotomic]


def _omega_powers(ctx: CycloContext) -> list[np.ndarray]:
    out = [np.eye(ctx.phi, dtype=np.int64)]
    for _ in range(1, ctx.phi):
        out.append(ctx.omega_matrix @ out[-1])
    return out


def _regular_blocks(ctx: CycloContext, packs: np.ndarray) -> np.ndarray:
    """(nnz, phi) coefficient packs -> (nnz, phi, phi) multiplication blocks."""
    powers = _omega_powers(ctx)
    # block[:, l, k] = coefficient l of a * omega^k
    return np.stack([packs @ P.T for P in powers], axis=2)


def _scalar_parts(ctx: CycloContext, c: Scalar) -> tuple[np.ndarray, int]:
    """Integer pack and denominator with c = pack / den."""
    if not isinstance(c, Cyclotomic):
        c = ctx.from_int(c)
    den = c.denominator()
    pack = np.array([int(x * den) for x in c.coeffs], dtype=object)
    return pack, den


def _fits(bound: float) -> bool:
    return bound < INT64_LIMIT


def _absmax(m) -> int:
    if sp.issparse(m):
        return int(abs(m.data).max()) if m.nnz else 0
    if m.dtype == object:
        return max((abs(int(v)) for v in m), default=0)
    return int(np.abs(m).max()) if m.size else 0


def _checked_matmul(A: sp.csr_matrix, B: sp.csr_matrix) -> sp.csr_matrix:
    """Exact integer product of two int64 CSR matrices.

    Raises OverflowError when the product cannot be bounded below 2^62.
    """
    if A.nnz == 0 or B.nnz == 0:
        return sp.csr_matrix(A.shape[:1] + B.shape[1:], dtype=np.int64)
    absA = abs(A).astype(np.float64)
    rowsum = float(np.asarray(absA.sum(axis=1)).max())
    bound = rowsum * float(abs(B.data).max())
    if not _fits(bound):
        bound = float((absA @ abs(B).astype(np.float64)).max())
    if not _fits(bound):
        raise OverflowError(f"exact product exceeds the int64 range (bound {bound:.3g})")
    dense_a = A.nnz > 0.2 * A.shape[0] * A.shape[1]
    dense_b = B.nnz > 0.2 * B.shape[0] * B.shape[1]
    if dense_a and dense_b and bound < FLOAT_EXACT and A.shape[0] * B.shape[1] <= 4_000_000:
        # partial sums stay below 2^52, so BLAS in doubles is exact
        prod = A.astype(np.float64).toarray() @ B.astype(np.float64).toarray()
        return sp.csr_matrix(np.rint(prod).astype(np.int64))
    out = (A @ B).tocsr()
    out.eliminate_zeros()
    return out


def _lin_comb(A: sp.csr_matrix, a: int, B: sp.csr_matrix, b: int) -> sp.csr_matrix:
    """a*A + b*B exactly."""
    bound = abs(a) * _absmax(A) + abs(b) * _absmax(B)
    if not _fits(bound):
        raise OverflowError(f"exact sum exceeds the int64 range (bound {bound:.3g})")
    out = (A + B).tocsr() if a == 1 and b == 1 else (A * a + B * b).tocsr()
    out.eliminate_zeros()
    return out.astype(np.int64)


def _scale_int(A: sp.csr_matrix, a: int) -> sp.csr_matrix:
    if a == 1:
        return A
    if not _fits(abs(a) * _absmax(A)):
        raise OverflowError("exact scaling exceeds the int64 range")
    return (A * a).astype(np.int64)


def _content(A: sp.csr_matrix) -> int:
    if A.nnz == 0:
        return 0
    return int(np.gcd.reduce(np.abs(A.data)))


class SparseOp:
    """Sparse (rows x cols) operator with entries in Q(omega)."""

    __slots__ = ("ctx", "shape", "mat", "den")

    def __init__(self, ctx: CycloContext, shape: tuple[int, int], mat: sp.spmatrix, den: int = 1) -> None:
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.ctx = ctx
        self.shape = (int(shape[0]), int(shape[1]))
        mat = mat.tocsr()
        if mat.dtype != np.int64:
            mat = mat.astype(np.int64)
        if mat.shape != (self.shape[0] * ctx.phi, self.shape[1] * ctx.phi):
            raise ValueError(f"matrix shape {mat.shape} does not match {self.shape} x phi={ctx.phi}")
        self.mat = mat
        self.den = int(den)
        self._normalize()

    def _normalize(self) -> None:
        self.mat.eliminate_zeros()
        if self.mat.nnz == 0:
            self.den = 1
            return
        g = gcd(_content(self.mat), self.den)
        if g > 1:
            self.mat = self.mat.copy()
            self.mat.data //= g
            self.den //= g

    # construction
    @classmethod
    def from_packs(
        cls,
        ctx: CycloContext,
        shape: tuple[int, int],
        rows: np.ndarray,
        cols: np.ndarray,
        packs: np.ndarray,
        den: int = 1,
    ) -> "SparseOp":
        """Entries a_{rows[k], cols[k]} = packs[k] / den (packs in the reduced power basis)."""
        phi = ctx.phi
        packs = np.asarray(packs, dtype=np.int64).reshape(-1, phi)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        keep = np.any(packs != 0, axis=1)
        rows, cols, packs = rows[keep], cols[keep], packs[keep]
        blocks = _regular_blocks(ctx, packs)  # (nnz, l, k)
        ll, kk = np.meshgrid(np.arange(phi), np.arange(phi), indexing="ij")
        R = (rows[:, None, None] * phi + ll[None]).ravel()
        C = (cols[:, None, None] * phi + kk[None]).ravel()
        V = blocks.ravel()
        nz = V != 0
        mat = sp.csr_matrix((V[nz], (R[nz], C[nz])), shape=(shape[0] * phi, shape[1] * phi))
        mat.sum_duplicates()
        return cls(ctx, shape, mat, den)

    @classmethod
    def from_dict(cls, ctx: CycloContext, shape: tuple[int, int], entries: Mapping[tuple[int, int], Scalar]) -> "SparseOp":
        items = [(k, v if isinstance(v, Cyclotomic) else ctx.from_int(v)) for k, v in entries.items()]
        items = [(k, v) for k, v in items if not v.is_zero()]
        den = lcm(1, *(v.denominator() for _, v in items)) if items else 1
        rows = np.array([k[0] for k, _ in items], dtype=np.int64)
        cols = np.array([k[1] for k, _ in items], dtype=np.int64)
        ints = [[int(c * den) for c in v.coeffs] for _, v in items]
        if any(abs(x) >= INT64_LIMIT for p in ints for x in p):
            raise OverflowError("entry numerators exceed int64")
        packs = np.array(ints, dtype=np.int64).reshape(len(items), ctx.phi)
        return cls.from_packs(ctx, shape, rows, cols, packs, den)

    @classmethod
    def identity(cls, ctx: CycloContext, n: int) -> "SparseOp":
        return cls(ctx, (n, n), sp.identity(n * ctx.phi, dtype=np.int64, format="csr"))

    @classmethod
    def zeros(cls, ctx: CycloContext, shape: tuple[int, int]) -> "SparseOp":
        return cls(ctx, shape, sp.csr_matrix((shape[0] * ctx.phi, shape[1] * ctx.phi), dtype=np.int64))

    @classmethod
    def diagonal(cls, ctx: CycloContext, packs: np.ndarray) -> "SparseOp":
        n = len(packs)
        idx = np.arange(n)
        return cls.from_packs(ctx, (n, n), idx, idx, packs)

    # queries
    @property
    def nnz(self) -> int:
        """Number of nonzero Q(omega) entries."""
        return self.mat[:, :: self.ctx.phi].nnz if self.ctx.phi > 1 else self.mat.nnz

    def is_zero(self) -> bool:
        return self.mat.nnz == 0

    def entry(self, i: int, j: int) -> Cyclotomic:
        phi = self.ctx.phi
        col = self.mat[i * phi : (i + 1) * phi, j * phi].toarray().ravel()
        return Cyclotomic(self.ctx, [Fraction(int(v), self.den) for v in col])

    def packs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nonzero entries as (rows, cols, packs) in row-major order; values are packs / den."""
        phi = self.ctx.phi
        first = self.mat[:, ::phi].tocoo()
        i = first.row // phi
        l = first.row % phi
        keys = i.astype(np.int64) * self.shape[1] + first.col
        uniq, inv = np.unique(keys, return_inverse=True)
        packs = np.zeros((len(uniq), phi), dtype=first.data.dtype)
        packs[inv, l] = first.data
        return uniq // self.shape[1], uniq % self.shape[1], packs

    def entries(self) -> Iterator[tuple[int, int, Cyclotomic]]:
        """Nonzero entries in row-major order."""
        rows, cols, packs = self.packs()
        for i, j, pk in zip(rows, cols, packs):
            yield int(i), int(j), Cyclotomic(self.ctx, [Fraction(int(v), self.den) for v in pk])

    def to_dict(self) -> dict[tuple[int, int], Cyclotomic]:
        return {(i, j): v for i, j, v in self.entries()}

    def to_complex(self) -> sp.csr_matrix:
        """Embedding omega -> exp(2 pi i / N), as a complex scipy matrix."""
        phi = self.ctx.phi
        first = self.mat[:, ::phi].astype(np.float64)
        out = None
        for l in range(phi):
            part = first[l::phi, :] * self.ctx.roots[l]
            out = part if out is None else out + part
        return (out / self.den).tocsr()

    def __repr__(self) -> str:
        return f"SparseOp(N={self.ctx.N}, shape={self.shape}, nnz={self.nnz}, den={self.den})"

    # arithmetic
    def _check(self, other: "SparseOp") -> None:
        if other.ctx.N != self.ctx.N:
            raise ValueError("context mismatch")

    def __add__(self, other: "SparseOp") -> "SparseOp":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        d = lcm(self.den, other.den)
        return SparseOp(self.ctx, self.shape, _lin_comb(self.mat, d // self.den, other.mat, d // other.den), d)

    def __neg__(self) -> "SparseOp":
        return SparseOp(self.ctx, self.shape, _scale_int(self.mat, -1), self.den)

    def __sub__(self, other: "SparseOp") -> "SparseOp":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        d = lcm(self.den, other.den)
        return SparseOp(self.ctx, self.shape, _lin_comb(self.mat, d // self.den, other.mat, -(d // other.den)), d)

    def scale(self, c: Scalar) -> "SparseOp":
        pack, den = _scalar_parts(self.ctx, c)
        if not any(pack):
            return SparseOp.zeros(self.ctx, self.shape)
        # right-multiply every block by the multiplication matrix of the scalar
        phi = self.ctx.phi
        M = np.zeros((phi, phi), dtype=object)
        for k, P in enumerate(_omega_powers(self.ctx)):
            M[:, k] = P.astype(object) @ pack
        if all(abs(int(v)) < INT64_LIMIT for v in M.ravel()):
            block = sp.kron(sp.identity(self.shape[1], dtype=np.int64), sp.csr_matrix(M.astype(np.int64)), format="csr")
        else:
            raise OverflowError("scalar numerator exceeds int64")
        return SparseOp(self.ctx, self.shape, _checked_matmul(self.mat, block), self.den * den)

    def __mul__(self, c: Scalar) -> "SparseOp":
        if isinstance(c, (int, Fraction, Cyclotomic)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, SparseOp):
            self._check(other)
            if self.shape[1] != other.shape[0]:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            return SparseOp(
                self.ctx, (self.shape[0], other.shape[1]), _checked_matmul(self.mat, other.mat), self.den * other.den
            )
        if isinstance(other, StateVector):
            return other.apply(self)
        return NotImplemented

    def __pow__(self, k: int) -> "SparseOp":
        out = SparseOp.identity(self.ctx, self.shape[0])
        for _ in range(k):
            out = out @ self
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseOp):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def restrict(self, rows: np.ndarray, cols: np.ndarray | None = None) -> "SparseOp":
        """Sub-block on the given basis indices (e.g. a charge sector)."""
        cols = rows if cols is None else cols
        phi = self.ctx.phi
        r = (np.asarray(rows)[:, None] * phi + np.arange(phi)).ravel()
        c = (np.asarray(cols)[:, None] * phi + np.arange(phi)).ravel()
        return SparseOp(self.ctx, (len(rows), len(cols)), self.mat[r][:, c], self.den)

    def columns_outside(self, rows: np.ndarray) -> bool:
        """True if some entry maps into a row outside ``rows``."""
        phi = self.ctx.phi
        mask = np.ones(self.shape[0], dtype=bool)
        mask[np.asarray(rows)] = False
        r = (np.flatnonzero(mask)[:, None] * phi + np.arange(phi)).ravel()
        return self.mat[r].nnz > 0


def commutator(a: SparseOp, b: SparseOp) -> SparseOp:
    return a @ b - b @ a


class StateVector:
    """Vector in Q(omega)^dim, stored as integer coefficients over a common denominator."""

    __slots__ = ("ctx", "dim", "data", "den")

    def __init__(self, ctx: CycloContext, dim: int, data: np.ndarray, den: int = 1) -> None:
        if len(data) != dim * ctx.phi:
            raise ValueError("data length does not match dim * phi")
        self.ctx = ctx
        self.dim = int(dim)
        self.data = data
        self.den = int(den)
        self._normalize()

    def _normalize(self) -> None:
        if self.data.dtype == object:
            g = 0
            for v in self.data:
                g = gcd(g, int(v))
            if g == 0:
                self.data = np.zeros(len(self.data), dtype=np.int64)
                self.den = 1
                return
            g = gcd(g, self.den)
            small = all(abs(int(v)) // g < INT64_LIMIT for v in self.data)
            self.data = np.array([int(v) // g for v in self.data], dtype=np.int64 if small else object)
            self.den //= g
            return
        else:
            g = int(np.gcd.reduce(np.abs(self.data))) if self.data.size else 0
        if g == 0:
            self.den = 1
            return
        g = gcd(g, self.den)
        if g > 1:
            self.data = self.data // g
            self.den //= g

    @classmethod
    def basis(cls, ctx: CycloContext, dim: int, index: int, coeff: Scalar = 1) -> "StateVector":
        data = np.zeros(dim * ctx.phi, dtype=np.int64)
        pack, den = _scalar_parts(ctx, coeff)
        data[index * ctx.phi : (index + 1) * ctx.phi] = [int(v) for v in pack]
        return cls(ctx, dim, data, den)

    @classmethod
    def zeros(cls, ctx: CycloContext, dim: int) -> "StateVector":
        return cls(ctx, dim, np.zeros(dim * ctx.phi, dtype=np.int64))

    @classmethod
    def from_dict(cls, ctx: CycloContext, dim: int, amps: Mapping[int, Scalar]) -> "StateVector":
        out = cls.zeros(ctx, dim)
        for i, a in amps.items():
            out = out + cls.basis(ctx, dim, i, a)
        return out

    def apply(self, op: SparseOp) -> "StateVector":
        if op.shape[1] != self.dim:
            raise ValueError(f"operator {op.shape} cannot act on dim {self.dim}")
        mat = op.mat
        if mat.dtype != object and self.data.dtype != object:
            try:
                y = kernels.csr_matvec_checked(mat.indptr, mat.indices, mat.data, self.data)
                return StateVector(self.ctx, op.shape[0], np.asarray(y, dtype=np.int64), self.den * op.den)
            except OverflowError:
                log.debug("int64 matvec overflow; exact object fallback")
        x = self.data.astype(object)
        data = mat.data.astype(object)
        y = np.zeros(op.shape[0] * self.ctx.phi, dtype=object)
        for i in range(mat.shape[0]):
            lo, hi = mat.indptr[i], mat.indptr[i + 1]
            if hi > lo:
                y[i] = np.dot(data[lo:hi], x[mat.indices[lo:hi]])
        return StateVector(self.ctx, op.shape[0], y, self.den * op.den)

    def _combine(self, other: "StateVector", sign: int) -> "StateVector":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        d = lcm(self.den, other.den)
        a, b = d // self.den, sign * (d // other.den)
        if self.data.dtype != object and other.data.dtype != object:
            bound = abs(a) * _absmax(self.data) + abs(b) * _absmax(other.data)
            if _fits(bound):
                return StateVector(self.ctx, self.dim, self.data * a + other.data * b, d)
        data = self.data.astype(object) * a + other.data.astype(object) * b
        return StateVector(self.ctx, self.dim, data, d)

    def __add__(self, other: "StateVector") -> "StateVector":
        return self._combine(other, 1)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self._combine(other, -1)

    def __neg__(self) -> "StateVector":
        return StateVector(self.ctx, self.dim, -self.data, self.den)

    def scale(self, c: Scalar) -> "StateVector":
        pack, den = _scalar_parts(self.ctx, c)
        phi = self.ctx.phi
        M = np.zeros((phi, phi), dtype=object)
        for k, P in enumerate(_omega_powers(self.ctx)):
            M[:, k] = P.astype(object) @ pack
        blocks = self.data.reshape(self.dim, phi)
        mrow = max(sum(abs(int(v)) for v in row) for row in M)
        if blocks.dtype != object and _fits(float(mrow) * _absmax(blocks)):
            out = blocks @ M.astype(np.int64).T
        else:
            out = blocks.astype(object) @ M.T
        return StateVector(self.ctx, self.dim, out.ravel(), self.den * den)

    def __mul__(self, c: Scalar) -> "StateVector":
        return self.scale(c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.dim == other.dim and (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def amplitude(self, i: int) -> Cyclotomic:
        phi = self.ctx.phi
        return Cyclotomic(self.ctx, [Fraction(int(v), self.den) for v in self.data[i * phi : (i + 1) * phi]])

    def support(self) -> np.ndarray:
        blocks = self.data.reshape(self.dim, self.ctx.phi)
        return np.flatnonzero(np.any(blocks != 0, axis=1))

    def amplitudes(self) -> dict[int, Cyclotomic]:
        """Sparse view: basis index -> nonzero amplitude."""
        return {int(i): self.amplitude(int(i)) for i in self.support()}

    def to_complex(self) -> np.ndarray:
        blocks = self.data.reshape(self.dim, self.ctx.phi).astype(np.float64)
        return (blocks @ self.ctx.roots) / self.den

    def restrict(self, basis: np.ndarray) -> "StateVector":
        phi = self.ctx.phi
        idx = (np.asarray(basis)[:, None] * phi + np.arange(phi)).ravel()
        return StateVector(self.ctx, len(basis), self.data[idx].copy(), self.den)

    def embed(self, basis: np.ndarray, dim: int) -> "StateVector":
        phi = self.ctx.phi
        data = np.zeros(dim * phi, dtype=self.data.dtype)
        idx = (np.asarray(basis)[:, None] * phi + np.arange(phi)).ravel()
        data[idx] = self.data
        return StateVector(self.ctx, dim, data, self.den)

    def is_multiple_of(self, other: "StateVector") -> Cyclotomic | None:
        """Return c with self == c * other, or None."""
        sup = other.support()
        if len(sup) == 0:
            return self.ctx.zero if self.is_zero() else None
        c = self.amplitude(int(sup[0])) / other.amplitude(int(sup[0]))
        return c if self == other.scale(c) else None

    def __repr__(self) -> str:
        return f"StateVector(N={self.ctx.N}, dim={self.dim}, support={len(self.support())})"


def linear_combination(terms: Iterable[tuple[Scalar, StateVector]]) -> StateVector:
    out = None
    for c, v in terms:
        part = v.scale(c)
        out = part if out is None else out + part
    if out is None:
        raise ValueError("empty combination")
    return out
