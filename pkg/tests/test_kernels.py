from __future__ import annotations

import os
import subprocess
import sys
from itertools import product

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from tau2loop import _kernels_py, kernels
from tau2loop.loop_algebra.divided import _KINDS, _weights, gauss_table
from tau2loop.state_space import LatticeConfig, sector_basis

try:
    from tau2loop import _kernels as compiled
except ImportError:  # pragma: no cover
    compiled = None

needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


@given(st.integers(0, 12), st.integers(1, 5), st.integers(0, 4))
def test_compositions_brute_force(total, L, maxpart):
    got = _kernels_py.compositions(total, L, maxpart)
    want = [c for c in product(range(maxpart + 1), repeat=L) if sum(c) == total]
    assert [tuple(r) for r in got] == want
    assert got.shape == (len(want), L)


@needs_ext
@given(st.integers(0, 12), st.integers(1, 6), st.integers(0, 4))
def test_compositions_backends_agree(total, L, maxpart):
    assert np.array_equal(compiled.compositions(total, L, maxpart), _kernels_py.compositions(total, L, maxpart))


def _entries(mod, N, L, label, k):
    cfg = LatticeConfig(N, L)
    kind = _KINDS[label]
    digits = np.ascontiguousarray(cfg.digits[sector_basis(cfg, 0)])
    comps = mod.compositions(k, L, N - 1)
    cols, ranks, cyc = mod.divided_power_entries(
        N, digits, comps, gauss_table(N, kind.raising), kind.raising, kind.suffix, _weights(kind, N, L)
    )
    order = np.lexsort((np.asarray(ranks), np.asarray(cols)))
    return np.asarray(cols)[order], np.asarray(ranks)[order], np.asarray(cyc)[order]


@needs_ext
@pytest.mark.parametrize("N, L", [(2, 4), (3, 3), (3, 6), (4, 4)])
@pytest.mark.parametrize("label", sorted(_KINDS))
def test_divided_power_entries_backends_agree(N, L, label):
    for a, b in zip(_entries(compiled, N, L, label, N), _entries(_kernels_py, N, L, label, N)):
        assert np.array_equal(a, b)


@pytest.mark.parametrize("mod", [m for m in (_kernels_py, compiled) if m is not None])
def test_csr_matvec(mod):
    rng = np.random.default_rng(1)
    A = sp.random(20, 20, density=0.2, random_state=2, format="csr")
    A.data = rng.integers(-50, 50, size=A.nnz).astype(np.int64)
    A = A.astype(np.int64)
    x = rng.integers(-100, 100, size=20).astype(np.int64)
    got = mod.csr_matvec_checked(A.indptr.astype(np.int64), A.indices.astype(np.int64), A.data, x)
    assert np.array_equal(np.asarray(got), A @ x)


@pytest.mark.parametrize("mod", [m for m in (_kernels_py, compiled) if m is not None])
def test_csr_matvec_overflow(mod):
    A = sp.csr_matrix(np.array([[2**40]], dtype=np.int64))
    x = np.array([2**40], dtype=np.int64)
    with pytest.raises(OverflowError):
        mod.csr_matvec_checked(A.indptr.astype(np.int64), A.indices.astype(np.int64), A.data, x)


def test_pure_backend_forced_by_environment():
    env = dict(os.environ, TAU2LOOP_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from tau2loop import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    if compiled is not None and os.environ.get("TAU2LOOP_PURE", "") in ("", "0"):
        assert kernels.BACKEND == "cython"
