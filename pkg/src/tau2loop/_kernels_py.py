"""Pure numpy implementations of the hot kernels (fallback for ``_kernels``).

Both modules expose the same three functions; ``tau2loop.kernels`` picks one
at import time.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

INT64_LIMIT = 2**62


def compositions(total: int, L: int, maxpart: int) -> np.ndarray:
    """All (nu_1..nu_L) with 0 <= nu_m <= maxpart summing to ``total``, lexicographic."""
    out: list[tuple[int, ...]] = []
    buf = [0] * L

    def rec(m: int, rest: int) -> None:
        if m == L - 1:
            if rest <= maxpart:
                buf[m] = rest
                out.append(tuple(buf))
            return
        cap = maxpart * (L - m - 1)
        for v in range(max(0, rest - cap), min(maxpart, rest) + 1):
            buf[m] = v
            rec(m + 1, rest - v)

    if 0 <= total <= maxpart * L:
        rec(0, total)
    return np.array(out, dtype=np.int64).reshape(len(out), L)


def divided_power_entries(
    N: int,
    digits: np.ndarray,
    comps: np.ndarray,
    gauss: np.ndarray,
    raising: bool,
    suffix: bool,
    weights: np.ndarray,
):
    """Matrix entries of a composition-sum operator on the states in ``digits``.

    For each input state (row of ``digits``) and composition nu, the site factor at
    site m is either f^nu/[nu]! Z^s (raising) or Z^s e^nu/[nu]! (lowering), with
    s the sum of nu over later sites (suffix) or earlier sites (prefix); the term
    carries the global phase omega^(sum weights_m nu_m).

    Returns (col, out_rank, cyc): input position, output rank in the full space,
    and the coefficient as a length-N integer vector in powers of omega.
    """
    S, L = digits.shape
    place = N ** np.arange(L - 1, -1, -1, dtype=np.int64)
    cols_all, ranks_all, cyc_all = [], [], []
    ar = np.arange(S)
    for nu in comps:
        if suffix:
            s = np.concatenate([np.cumsum(nu[::-1])[::-1][1:], [0]])
        else:
            s = np.concatenate([[0], np.cumsum(nu)[:-1]])
        new = digits + nu if raising else digits - nu
        valid = np.all((new >= 0) & (new < N), axis=1)
        if not valid.any():
            continue
        d = digits[valid]
        nd = new[valid]
        zbase = d if raising else nd
        phase = (zbase @ s + int(weights @ nu)) % N
        acc = np.zeros((len(d), N), dtype=np.int64)
        acc[:, 0] = 1
        for m in np.flatnonzero(nu):
            g = gauss[d[:, m], nu[m]]
            nxt = np.zeros_like(acc)
            for a in range(N):
                for b in range(N):
                    nxt[:, (a + b) % N] += acc[:, a] * g[:, b]
            acc = nxt
        rows = ar[: len(d)][:, None]
        shifted = np.empty_like(acc)
        shifted[rows, (np.arange(N)[None, :] + phase[:, None]) % N] = acc
        cols_all.append(np.flatnonzero(valid))
        ranks_all.append(nd @ place)
        cyc_all.append(shifted)
    if not cols_all:
        return (np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros((0, N), np.int64))
    return np.concatenate(cols_all), np.concatenate(ranks_all), np.concatenate(cyc_all)


def csr_matvec_checked(indptr: np.ndarray, indices: np.ndarray, data: np.ndarray, x: np.ndarray) -> np.ndarray:
    """y = A x for int64 CSR A; raises OverflowError if int64 could overflow."""
    shape = (len(indptr) - 1, len(x))
    bound = sp.csr_matrix((np.abs(data).astype(np.float64), indices, indptr), shape=shape) @ np.abs(x).astype(np.float64)
    if bound.max(initial=0.0) >= INT64_LIMIT:
        raise OverflowError("int64 matvec bound exceeded")
    return sp.csr_matrix((data, indices, indptr), shape=shape) @ x
