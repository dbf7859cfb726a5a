from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from tau2loop.exact_arith import get_context
from tau2loop.sparse import SparseOp, StateVector, commutator, linear_combination


@st.composite
def op_pair(draw):
    N = draw(st.sampled_from([2, 3, 4, 5]))
    ctx = get_context(N)
    n = draw(st.integers(1, 5))

    def one():
        entries = draw(
            st.dictionaries(
                st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                st.lists(st.integers(-9, 9), min_size=1, max_size=N),
                max_size=n * n,
            )
        )
        return SparseOp.from_dict(ctx, (n, n), {k: ctx.element(v) for k, v in entries.items()})

    return ctx, one(), one()


def dense(op: SparseOp) -> np.ndarray:
    return op.to_complex().toarray()


@given(op_pair())
def test_matches_dense_reference(data):
    ctx, a, b = data
    assert np.allclose(dense(a @ b), dense(a) @ dense(b), atol=1e-9)
    assert np.allclose(dense(a + b), dense(a) + dense(b))
    assert np.allclose(dense(commutator(a, b)), dense(a) @ dense(b) - dense(b) @ dense(a), atol=1e-9)
    w = ctx.omega(1)
    assert np.allclose(dense(a.scale(w)), w.to_complex() * dense(a))


@given(op_pair())
def test_exact_identities(data):
    ctx, a, b = data
    assert a - a == SparseOp.zeros(ctx, a.shape)
    assert (a @ b) @ a == a @ (b @ a)
    assert SparseOp.identity(ctx, a.shape[0]) @ a == a
    assert a**2 == a @ a
    assert SparseOp.from_dict(ctx, a.shape, a.to_dict()) == a


@given(op_pair())
def test_vector_apply_matches_operator(data):
    ctx, a, b = data
    n = a.shape[0]
    v = StateVector.from_dict(ctx, n, {0: ctx.omega(1), n - 1: 3})
    assert np.allclose(v.apply(a).apply(b).to_complex(), dense(b @ a) @ v.to_complex(), atol=1e-9)


def test_rational_scaling():
    ctx = get_context(3)
    a = SparseOp.identity(ctx, 2)
    from fractions import Fraction

    half = a.scale(Fraction(1, 2))
    assert half + half == a
    assert half.entry(0, 0) == ctx.from_int(1) * Fraction(1, 2)


def test_operator_overflow_raises():
    ctx = get_context(2)
    big = SparseOp.from_dict(ctx, (1, 1), {(0, 0): 2**40})
    with pytest.raises(OverflowError):
        big @ big @ big


def test_vector_promotes_to_python_ints():
    ctx = get_context(2)
    op = SparseOp.from_dict(ctx, (1, 1), {(0, 0): 2**40})
    v = StateVector.basis(ctx, 1, 0)
    for _ in range(3):
        v = v.apply(op)
    assert v.amplitude(0) == ctx.from_int(2**120)


def test_vector_helpers():
    ctx = get_context(3)
    w = ctx.omega(1)
    u = StateVector.basis(ctx, 4, 1)
    v = u.scale(w)
    assert v.is_multiple_of(u) == w
    assert linear_combination([(1, u), (-1, u)]).is_zero()
    assert list(v.support()) == [1]
    assert (u - u).is_zero()
    assert StateVector.zeros(ctx, 4).is_zero()


def test_restrict():
    ctx = get_context(2)
    a = SparseOp.from_dict(ctx, (3, 3), {(0, 1): 1, (2, 2): 5})
    r = a.restrict(np.array([0, 2]), np.array([1, 2]))
    assert r.to_dict() == {(0, 0): ctx.one, (1, 1): ctx.from_int(5)}
    assert isinstance(a.to_complex(), sp.csr_matrix)
