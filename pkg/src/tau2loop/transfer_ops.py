"""Site operators, face operators, the monodromy matrix and tau_2(t).

Everything here is exact: operators are :class:`SparseOp` over Q(omega) on the
full edge space of dimension N^L, and t is a formal variable, so operator
valued polynomials are lists of coefficient operators (:class:`OpPoly`).
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .checks import CheckResult, failed, passed, timed
from .exact_arith import CycloContext, Cyclotomic, TPoly, get_context
from .sparse import Scalar, SparseOp, StateVector
from .state_space import LatticeConfig, sector_basis

log = logging.getLogger(__name__)

CACHE_VERSION = 1


# single-site operators

def _site_op(config: LatticeConfig, j: int, rule: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]) -> SparseOp:
    """Operator acting on leg j through ``rule(n) -> (keep, n_new, omega_exponent_vector)``.

    ``omega_exponent_vector`` is a (len, N) integer array: the coefficient of the
    matrix element as a combination of omega^0..omega^(N-1).
    """
    if not 1 <= j <= config.L:
        raise IndexError(f"site {j} outside 1..{config.L}")
    ctx = get_context(config.N)
    n = config.digits[:, j - 1]
    keep, new, cyc = rule(n)
    cols = np.flatnonzero(keep)
    place = config.N ** (config.L - j)
    rows = cols + (new[keep] - n[keep]) * place
    packs = cyc[keep] @ ctx.reduce_matrix
    return SparseOp.from_packs(ctx, (config.dim, config.dim), rows, cols, packs)


def _unit(N: int, k: np.ndarray) -> np.ndarray:
    out = np.zeros((len(k), N), dtype=np.int64)
    out[np.arange(len(k)), k % N] = 1
    return out


def _qint(N: int, k: np.ndarray) -> np.ndarray:
    """[k] = 1 + omega + ... + omega^(k-1) as rows of omega-exponent vectors (0 <= k <= N)."""
    return (np.arange(N)[None, :] < k[:, None]).astype(np.int64)


def site_z(config: LatticeConfig, j: int) -> SparseOp:
    N = config.N
    return _site_op(config, j, lambda n: (np.ones(len(n), bool), n, _unit(N, n)))


def site_x(config: LatticeConfig, j: int) -> SparseOp:
    N = config.N
    return _site_op(config, j, lambda n: (np.ones(len(n), bool), (n + 1) % N, _unit(N, np.zeros_like(n))))


def lowering_e(config: LatticeConfig, j: int) -> SparseOp:
    """e|n> = [n]|n-1>, e|0> = 0."""
    N = config.N
    return _site_op(config, j, lambda n: (n > 0, n - 1, _qint(N, n)))


def raising_f(config: LatticeConfig, j: int) -> SparseOp:
    """f|n> = [n+1]|n+1>, f|N-1> = 0."""
    N = config.N
    return _site_op(config, j, lambda n: (n < N - 1, n + 1, _qint(N, n + 1)))


def z_string(config: LatticeConfig, sites: Sequence[int]) -> SparseOp:
    """Product of Z_m over the given sites (diagonal)."""
    ctx = get_context(config.N)
    idx = [m - 1 for m in sites]
    expo = config.digits[:, idx].sum(axis=1) if idx else np.zeros(config.dim, dtype=np.int64)
    return SparseOp.diagonal(ctx, _unit(config.N, expo) @ ctx.reduce_matrix)


# operator-valued polynomials

class OpPoly:
    """Polynomial sum_k coeffs[k] t^k with SparseOp coefficients of a common shape."""

    __slots__ = ("ctx", "shape", "coeffs")

    def __init__(self, ctx: CycloContext, shape: tuple[int, int], coeffs: Sequence[SparseOp | None]) -> None:
        self.ctx = ctx
        self.shape = shape
        cs = [c if c is not None else SparseOp.zeros(ctx, shape) for c in coeffs]
        for c in cs:
            if c.shape != shape:
                raise ValueError(f"coefficient shape {c.shape} differs from {shape}")
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[SparseOp, ...] = tuple(cs)

    @classmethod
    def constant(cls, op: SparseOp) -> "OpPoly":
        return cls(op.ctx, op.shape, [op])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> SparseOp:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return SparseOp.zeros(self.ctx, self.shape)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "OpPoly") -> "OpPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return OpPoly(self.ctx, self.shape, [self.coeff(k) + other.coeff(k) for k in range(n)])

    def __sub__(self, other: "OpPoly") -> "OpPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return OpPoly(self.ctx, self.shape, [self.coeff(k) - other.coeff(k) for k in range(n)])

    def __neg__(self) -> "OpPoly":
        return OpPoly(self.ctx, self.shape, [-c for c in self.coeffs])

    def scale(self, c: Scalar) -> "OpPoly":
        return OpPoly(self.ctx, self.shape, [x.scale(c) for x in self.coeffs])

    def __matmul__(self, other):
        if isinstance(other, OpPoly):
            if not self.coeffs or not other.coeffs:
                return OpPoly(self.ctx, (self.shape[0], other.shape[1]), [])
            out: list[SparseOp | None] = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a.is_zero():
                    continue
                for k, b in enumerate(other.coeffs):
                    if b.is_zero():
                        continue
                    p = a @ b
                    out[i + k] = p if out[i + k] is None else out[i + k] + p
            return OpPoly(self.ctx, (self.shape[0], other.shape[1]), out)
        if isinstance(other, SparseOp):
            return OpPoly(self.ctx, (self.shape[0], other.shape[1]), [c @ other for c in self.coeffs])
        if isinstance(other, StateVector):
            return [c @ other for c in self.coeffs]
        return NotImplemented

    def __rmatmul__(self, other):
        if isinstance(other, SparseOp):
            return OpPoly(self.ctx, (other.shape[0], self.shape[1]), [other @ c for c in self.coeffs])
        return NotImplemented

    def shift(self, k: int) -> "OpPoly":
        """Multiply by t^k; negative k requires the low coefficients to vanish."""
        if k >= 0:
            return OpPoly(self.ctx, self.shape, [None] * k + list(self.coeffs))
        if any(not c.is_zero() for c in self.coeffs[:-k]):
            raise ValueError(f"t^{k} shift would leave negative powers")
        return OpPoly(self.ctx, self.shape, list(self.coeffs[-k:]))

    def restrict(self, rows: np.ndarray, cols: np.ndarray | None = None) -> "OpPoly":
        cols = rows if cols is None else cols
        return OpPoly(self.ctx, (len(rows), len(cols)), [c.restrict(rows, cols) for c in self.coeffs])

    def apply(self, v: StateVector) -> list[StateVector]:
        return [c @ v for c in self.coeffs]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OpPoly):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def first_difference(self, other: "OpPoly") -> dict | None:
        """Witness (t-power, row, col, values) of the first differing entry, or None."""
        diff = self - other
        for k, c in enumerate(diff.coeffs):
            if c.is_zero():
                continue
            i, j, _ = next(c.entries())
            return {
                "t_power": k,
                "row": i,
                "col": j,
                "lhs": str(self.coeff(k).entry(i, j)),
                "rhs": str(other.coeff(k).entry(i, j)),
            }
        return None

    def __repr__(self) -> str:
        return f"OpPoly(shape={self.shape}, degree={self.degree})"


def poly_commutator(a: OpPoly | SparseOp, b: OpPoly | SparseOp) -> OpPoly:
    return a @ b - b @ a


# face operators and the monodromy matrix

def face_operator(config: LatticeConfig, j: int) -> list[list[OpPoly]]:
    """u_j = [[1 - w t Z_j, -w t (1-w) f_j], [(1-w) e_j, w (Z_j - t)]]."""
    ctx = get_context(config.N)
    shape = (config.dim, config.dim)
    I = SparseOp.identity(ctx, config.dim)
    Z = site_z(config, j)
    w = ctx.omega(1)
    one_minus_w = ctx.one - w
    return [
        [OpPoly(ctx, shape, [I, Z.scale(-w)]), OpPoly(ctx, shape, [None, raising_f(config, j).scale(-w * one_minus_w)])],
        [OpPoly(ctx, shape, [lowering_e(config, j).scale(one_minus_w)]), OpPoly(ctx, shape, [Z.scale(w), I.scale(-w)])],
    ]


@dataclass
class MonodromyBlocks:
    """U(t) = [[A, B], [C, D]] with OpPoly entries."""

    config: LatticeConfig
    A: OpPoly
    B: OpPoly
    C: OpPoly
    D: OpPoly

    def block(self, name: str) -> OpPoly:
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D}[name]

    def coefficient(self, name: str, j: int) -> SparseOp:
        """Normalized coefficient X_j, U(t) = sum_j (-w t)^j [[A_j, B_j], [C_j, D_j]]."""
        ctx = get_context(self.config.N)
        return self.block(name).coeff(j).scale((-ctx.omega(1)) ** (-j) if j else ctx.one)


def _mat2_mul(P: list[list[OpPoly]], R: list[list[OpPoly]]) -> list[list[OpPoly]]:
    return [[P[a][0] @ R[0][b] + P[a][1] @ R[1][b] for b in range(2)] for a in range(2)]


def monodromy(config: LatticeConfig) -> MonodromyBlocks:
    """U = u_1 u_2 ... u_L, multiplied left to right."""
    U = face_operator(config, 1)
    for j in range(2, config.L + 1):
        U = _mat2_mul(U, face_operator(config, j))
    return MonodromyBlocks(config, U[0][0], U[0][1], U[1][0], U[1][1])


def boundary_coefficients(config: LatticeConfig) -> dict[str, SparseOp]:
    """Closed forms of A_0, A_L, D_0, D_L, B_L, B_1, C_0, C_{L-1}."""
    ctx = get_context(config.N)
    L = config.L
    w = ctx.omega(1)
    c = ctx.one - w
    I = SparseOp.identity(ctx, config.dim)
    allZ = z_string(config, range(1, L + 1))
    B_L = B_1 = C_0 = C_L1 = SparseOp.zeros(ctx, (config.dim, config.dim))
    for j in range(1, L + 1):
        before = z_string(config, range(1, j))
        after = z_string(config, range(j + 1, L + 1))
        f, e = raising_f(config, j), lowering_e(config, j)
        B_L = B_L + before @ f
        B_1 = B_1 + (f @ after).scale(ctx.omega(L - j))
        C_0 = C_0 + (before @ e).scale(ctx.omega(j - 1))
        C_L1 = C_L1 + e @ after
    return {
        "A0": I,
        "AL": allZ,
        "D0": allZ.scale(ctx.omega(L)),
        "DL": I,
        "BL": B_L.scale(c),
        "B1": B_1.scale(c),
        "C0": C_0.scale(c),
        "CL1": C_L1.scale(c),
    }


BOUNDARY_INDEX = {
    "A0": ("A", 0),
    "AL": ("A", None),
    "D0": ("D", 0),
    "DL": ("D", None),
    "BL": ("B", None),
    "B1": ("B", 1),
    "C0": ("C", 0),
    "CL1": ("C", -1),
}


def monodromy_coefficient(blocks: MonodromyBlocks, key: str) -> SparseOp:
    """The monodromy coefficient a boundary_coefficients key refers to."""
    name, j = BOUNDARY_INDEX[key]
    L = blocks.config.L
    if j is None:
        j = L
    elif j < 0:
        j = L + j
    return blocks.coefficient(name, j)


def tau2_edge(config: LatticeConfig, blocks: MonodromyBlocks | None = None) -> OpPoly:
    """tau_2(t)|_Q = A(t) + omega^(-Q) D(t) on the full edge space."""
    blocks = blocks or monodromy(config)
    ctx = get_context(config.N)
    return blocks.A + blocks.D.scale(ctx.omega(-config.Q))


# spin-space cross-check

def _face_weight(ctx: CycloContext, alpha: int, beta: int, n: int) -> TPoly:
    """Face weight for alpha = a - d, beta = b - c and n = a - b (mod N)."""
    w = ctx.omega
    if (alpha, beta) == (0, 0):
        return TPoly(ctx, [ctx.one, -w(n + 1)])
    if (alpha, beta) == (0, 1):
        return TPoly(ctx, [ctx.zero, w(1) * (w(n + 1) - 1)])
    if (alpha, beta) == (1, 0):
        return TPoly(ctx, [ctx.one - w(n)])
    return TPoly(ctx, [w(n + 1), -w(1)])


# _face_weight as two monomials c t^a w^(s n + o), indexed by 2 alpha + beta
_FACE_TERMS = np.array(
    [
        [[1, 0, 0, 0], [-1, 1, 1, 1]],
        [[1, 1, 1, 2], [-1, 1, 0, 1]],
        [[1, 0, 0, 0], [-1, 0, 1, 0]],
        [[1, 0, 1, 1], [-1, 1, 0, 1]],
    ],
    dtype=np.int64,
)


def _spin_weights(config: LatticeConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All products of face weights at once, in the group ring Z[t][C_N].

    Returns (sigma' rank, sigma rank, P) where P[k, a, e] is the integer
    coefficient of t^a w^e in row k. Rows cover every sigma and every alpha in
    {0,1}^L, including products that vanish mod Phi_N.
    """
    N, L = config.N, config.L
    digits = config.digits
    bits = (np.arange(2**L)[:, None] >> (L - 1 - np.arange(L))[None, :]) & 1
    s_idx = np.repeat(np.arange(config.dim), 2**L)
    alpha = np.tile(bits, (config.dim, 1))
    sigma = digits[s_idx]
    M = len(s_idx)
    P = np.zeros((M, L + 1, N), dtype=np.int64)
    P[:, 0, 0] = 1
    omega_axis = np.arange(N)
    for J in range(L):
        K = (J + 1) % L
        n = (sigma[:, J] - sigma[:, K]) % N
        terms = _FACE_TERMS[2 * alpha[:, J] + alpha[:, K]]
        shifted_t = np.concatenate([np.zeros((M, 1, N), dtype=np.int64), P[:, :-1, :]], axis=1)
        new = np.zeros_like(P)
        for term in range(2):
            c, a, slope, off = (terms[:, term, i] for i in range(4))
            e = (slope * n + off) % N
            base = np.where((a == 1)[:, None, None], shifted_t, P)
            idx = (omega_axis[None, :] - e[:, None]) % N
            new += c[:, None, None] * np.take_along_axis(base, idx[:, None, :], axis=2)
        P = new
    place = N ** np.arange(L - 1, -1, -1)
    sp_rank = ((sigma - alpha) % N) @ place
    return sp_rank, s_idx, P


def spin_transfer(config: LatticeConfig) -> dict[tuple[int, int], TPoly]:
    """<sigma'| tau_2(t) |sigma> on spin space, keyed by (rank sigma', rank sigma).

    Ranks use the same positional code as the edge basis. Only sigma' = sigma - alpha
    with alpha in {0,1}^L can give nonzero weight.
    """
    ctx = get_context(config.N)
    sp_rank, s_idx, P = _spin_weights(config)
    R = P @ ctx.reduce_matrix
    keep = np.flatnonzero(R.reshape(len(R), -1).any(axis=1))
    return {
        (int(sp_rank[k]), int(s_idx[k])): TPoly(ctx, [ctx.element(row.tolist()) for row in R[k]]) for k in keep
    }


def _spin_to_edge(sigma: np.ndarray, N: int) -> np.ndarray:
    return (sigma - np.roll(sigma, -1)) % N


def fourier_consistency(config: LatticeConfig, max_dim: int = 3000) -> CheckResult:
    """Rebuild tau_2 on spin space, Fourier transform in sigma_1, compare with A + w^-Q D.

    Also checks that the spin shift commutes with the spin-space operator, so the
    Fourier vectors carry the shift eigenvalue omega^Q.
    """
    params = {"N": config.N, "L": config.L}
    with timed() as clock:
        result = _fourier_consistency(config, max_dim, params)
    result.elapsed = clock[0]
    return result


def _fourier_consistency(config: LatticeConfig, max_dim: int, params: dict) -> CheckResult:
    cid = "fourier.consistency"
    N, L = config.N, config.L
    if config.dim > max_dim:
        raise ValueError(f"spin space of dimension {config.dim} exceeds {max_dim}")
    ctx = get_context(N)
    sp_rank, s_idx, P = _spin_weights(config)
    R = P @ ctx.reduce_matrix
    keep = R.reshape(len(R), -1).any(axis=1)
    sp_rank, s_idx, P, R = sp_rank[keep], s_idx[keep], P[keep], R[keep]
    place = N ** np.arange(L - 1, -1, -1)
    digits = config.digits
    # translation invariance: <s'+1|T|s+1> = <s'|T|s>
    keys = sp_rank * config.dim + s_idx
    order = np.argsort(keys)
    up = (digits + 1) % N @ place
    moved = up[sp_rank] * config.dim + up[s_idx]
    hit = np.searchsorted(keys[order], moved)
    found = (hit < len(keys)) & (keys[order][np.minimum(hit, len(keys) - 1)] == moved)
    if not found.all():
        k = int(np.flatnonzero(~found)[0])
        return failed(cid, params, {"stage": "shift_invariance", "row": int(sp_rank[k]), "col": int(s_idx[k])})
    partner = order[hit]
    bad = np.flatnonzero((R[partner] != R).reshape(len(R), -1).any(axis=1))
    if len(bad):
        k = int(bad[0])
        return failed(cid, params, {"stage": "shift_invariance", "row": int(sp_rank[k]), "col": int(s_idx[k])})
    sector = sector_basis(config, 0)
    pos = np.full(config.dim, -1, dtype=np.int64)
    pos[sector] = np.arange(len(sector))
    first = digits[s_idx, 0] == 0
    rows_spin, cols_spin, Pf = sp_rank[first], s_idx[first], P[first]
    ell = (-digits[rows_spin, 0]) % N
    to_edge = lambda ranks: ((digits[ranks] - np.roll(digits[ranks], -1, axis=1)) % N) @ place  # noqa: E731
    rows, cols = pos[to_edge(rows_spin)], pos[to_edge(cols_spin)]
    S = len(sector)
    blocks = monodromy(config)
    omega_axis = np.arange(N)
    for Q in range(N):
        # multiply each term by w^(-Q ell) in the group ring, then sum into the sector matrix
        idx = (omega_axis[None, :] + Q * ell[:, None]) % N
        rolled = np.take_along_axis(Pf, idx[:, None, :], axis=2)
        acc = np.zeros((L + 1, S * S, N), dtype=np.int64)
        np.add.at(acc, (slice(None), rows * S + cols), rolled.transpose(1, 0, 2))
        acc = acc @ ctx.reduce_matrix
        edge = tau2_edge(config.with_Q(Q), blocks).restrict(sector)
        for k in range(max(edge.degree, L) + 1):
            want = np.zeros((S * S, ctx.phi), dtype=object)
            c = edge.coeff(k)
            er, ec, packs = c.packs()
            want[er * S + ec] = packs
            got = acc[k].astype(object) * c.den if k <= L else np.zeros_like(want)
            diff = np.flatnonzero((got != want).any(axis=1))
            if len(diff):
                key = int(diff[0])
                i, j = divmod(key, S)
                spin = ctx.element([v for v in acc[k][key]]) if k <= L else ctx.zero
                return failed(
                    cid,
                    params,
                    {"Q": Q, "t_power": k, "row": i, "col": j, "spin": str(spin), "edge": str(c.entry(i, j))},
                )
    return passed(cid, params, sector_dim=S)


def op_poly_commutator_zero(P: OpPoly, R: OpPoly, sector: np.ndarray | None = None, id: str = "commute") -> CheckResult:
    """[P_i, R_j] = 0 for every coefficient pair, on states of ``sector`` (all if None)."""
    params = {"shape": list(P.shape)}
    with timed() as clock:
        res = passed(id, params)
        rows = np.arange(P.shape[0])
        for i, a in enumerate(P.coeffs):
            for j, b in enumerate(R.coeffs):
                c = a @ b - b @ a
                if sector is not None:
                    c = c.restrict(rows, sector)
                if not c.is_zero():
                    r, col, v = next(c.entries())
                    res = failed(id, params, {"i": i, "j": j, "row": r, "col": col, "value": str(v)})
                    break
            if res.status != "pass":
                break
    res.elapsed = clock[0]
    return res


# operator cache

def cache_path(cache_dir: str | os.PathLike, config: LatticeConfig, name: str) -> Path:
    return Path(cache_dir) / f"N{config.N}_L{config.L}_{name}_v{__version__}.json"


def save_operator(path: str | os.PathLike, op: SparseOp, config: LatticeConfig, name: str) -> None:
    doc = {
        "version": CACHE_VERSION,
        "tool_version": __version__,
        "N": config.N,
        "L": config.L,
        "name": name,
        "dim": list(op.shape),
        "entries": [[i, j, v.to_strings()] for i, j, v in op.entries()],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc, separators=(",", ":")))
    tmp.replace(path)


def load_operator(path: str | os.PathLike, config: LatticeConfig, name: str) -> SparseOp:
    """Read a cached operator; raises ValueError when the file does not match."""
    doc = json.loads(Path(path).read_text())
    expect = {"version": CACHE_VERSION, "tool_version": __version__, "N": config.N, "L": config.L, "name": name}
    for key, val in expect.items():
        if doc.get(key) != val:
            raise ValueError(f"cache mismatch on {key}: {doc.get(key)!r} != {val!r}")
    ctx = get_context(config.N)
    shape = tuple(doc["dim"]) if isinstance(doc["dim"], list) else (doc["dim"], doc["dim"])
    entries = {(int(i), int(j)): Cyclotomic.from_strings(ctx, v) for i, j, v in doc["entries"]}
    return SparseOp.from_dict(ctx, shape, entries)


def cached_operator(
    cache_dir: str | os.PathLike | None, config: LatticeConfig, name: str, build: Callable[[], SparseOp]
) -> SparseOp:
    """Load ``name`` from the cache or build and store it; corrupt files are rebuilt."""
    if cache_dir is None:
        return build()
    path = cache_path(cache_dir, config, name)
    if path.exists():
        try:
            return load_operator(path, config, name)
        except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
            log.warning("rebuilding cached operator %s: %s", path, exc)
    op = build()
    save_operator(path, op, config, name)
    return op



# checks on the monodromy

def check_ground_eigenvalues(config: LatticeConfig, blocks: MonodromyBlocks | None = None) -> CheckResult:
    """tau_2(t)|_Q on |Omega> and |Omega-bar> as exact polynomial identities.

    Per site the diagonal face weights give A|Omega> = (1-wt)^L,
    D|Omega> = w^L (1-t)^L, A|Omega-bar> = (1-t)^L and D|Omega-bar> = (1-wt)^L.
    """
    params = {"N": config.N, "L": config.L, "Q": config.Q}
    with timed() as clock:
        res = _check_ground_eigenvalues(config, blocks or monodromy(config), params)
    res.elapsed = clock[0]
    return res


def _check_ground_eigenvalues(config: LatticeConfig, blocks: MonodromyBlocks, params: dict) -> CheckResult:
    ctx = get_context(config.N)
    L, Q = config.L, config.Q
    w = ctx.omega
    one_wt = TPoly(ctx, [ctx.one, -w(1)]) ** L
    one_t = TPoly(ctx, [1, -1]) ** L
    # face weights on |0>: 1 - w t and w (1 - t); on |N-1>: 1 - t and w (w^(N-1) - t) = 1 - w t
    expect = {
        "omega": one_wt + one_t * w(L - Q),
        "omega_bar": one_t + one_wt * w(-Q),
    }
    tau = blocks.A + blocks.D.scale(w(-Q))
    for name, rank in (("omega", 0), ("omega_bar", config.dim - 1)):
        v = StateVector.basis(ctx, config.dim, rank)
        eps = expect[name]
        for k in range(max(tau.degree, eps.degree) + 1):
            got = tau.coeff(k) @ v
            want = v.scale(eps.coeff(k))
            if got != want:
                return failed("tau2.eigen", params, {"state": name, "t_power": k, "expected": str(eps.coeff(k))})
    return passed("tau2.eigen", params, eigenvalue=str(expect["omega"]))


def check_boundary_coefficients(config: LatticeConfig, blocks: MonodromyBlocks | None = None) -> CheckResult:
    """The eight closed-form coefficients agree with the monodromy, and A, D have degree L."""
    params = {"N": config.N, "L": config.L}
    with timed() as clock:
        blocks = blocks or monodromy(config)
        res = passed("boundary.closed_forms", params)
        for key, op in boundary_coefficients(config).items():
            got = monodromy_coefficient(blocks, key)
            if got != op:
                i, j, _ = next((got - op).entries())
                res = failed("boundary.closed_forms", params, {"coefficient": key, "row": i, "col": j})
                break
        else:
            degs = {n: blocks.block(n).degree for n in "ABCD"}
            ok = degs["A"] == degs["D"] == config.L and degs["B"] <= config.L and degs["C"] <= config.L - 1
            if not ok or not blocks.B.coeff(0).is_zero():
                res = failed("boundary.closed_forms", params, {"degrees": degs})
    res.elapsed = clock[0]
    return res


def check_charge_grading(config: LatticeConfig, blocks: MonodromyBlocks | None = None) -> CheckResult:
    """A_j, D_j keep the charge, B_j raise it by 1, C_j lower it by 1 (mod N)."""
    params = {"N": config.N, "L": config.L}
    shifts = {"A": 0, "B": 1, "C": -1, "D": 0}
    with timed() as clock:
        blocks = blocks or monodromy(config)
        res = passed("monodromy.charge_grading", params)
        charges = config.charges
        for name, s in shifts.items():
            for k, c in enumerate(blocks.block(name).coeffs):
                rows, cols, _ = c.packs()
                bad = np.flatnonzero((charges[rows] - charges[cols] - s) % config.N)
                if len(bad):
                    res = failed(
                        "monodromy.charge_grading",
                        params,
                        {"block": name, "t_power": k, "row": int(rows[bad[0]]), "col": int(cols[bad[0]])},
                    )
                    break
            if res.status != "pass":
                break
    res.elapsed = clock[0]
    return res
