from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tau2loop.exact_arith import (
    Cyclotomic,
    TPoly,
    cyclotomic_polynomial,
    embed_complex,
    get_context,
    ground_eigenvalue,
    q_factorial,
    q_integer,
)

NS = st.sampled_from([2, 3, 4, 5, 6, 8, 12])
small = st.fractions(min_value=-20, max_value=20, max_denominator=6)


@st.composite
def element_pair(draw, count: int = 2):
    N = draw(NS)
    ctx = get_context(N)
    out = [ctx.element(draw(st.lists(small, min_size=1, max_size=N + 2))) for _ in range(count)]
    return ctx, out


@pytest.mark.parametrize(
    "N, expected",
    [(2, [1, 1]), (3, [1, 1, 1]), (4, [1, 0, 1]), (6, [1, -1, 1]), (12, [1, 0, -1, 0, 1])],
)
def test_cyclotomic_polynomial(N, expected):
    assert cyclotomic_polynomial(N) == expected


def test_omega_is_primitive_root():
    for N in (2, 3, 4, 5, 7, 9, 12):
        ctx = get_context(N)
        w = ctx.omega(1)
        assert w**N == ctx.one
        assert all(w**k != ctx.one for k in range(1, N))
        assert abs(w.to_complex() - np.exp(2j * np.pi / N)) < 1e-12


@given(element_pair(3))
def test_ring_axioms(data):
    ctx, (a, b, c) = data
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == ctx.zero


@given(element_pair(1))
def test_inverse(data):
    ctx, (a,) = data
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == ctx.one
        assert (a**-2) * a * a == ctx.one


@given(element_pair(2))
def test_embedding_is_a_homomorphism(data):
    ctx, (a, b) = data
    assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-8 * (1 + abs(a.to_complex() * b.to_complex()))
    assert abs((a + b).to_complex() - a.to_complex() - b.to_complex()) < 1e-9 * (1 + abs(a.to_complex()) + abs(b.to_complex()))


@given(element_pair(1))
def test_string_roundtrip(data):
    ctx, (a,) = data
    assert Cyclotomic.from_strings(ctx, a.to_strings()) == a


def test_q_integers_vanish_at_N():
    for N in (2, 3, 4, 5):
        ctx = get_context(N)
        assert q_integer(N, ctx).is_zero()
        assert all(not q_integer(n, ctx).is_zero() for n in range(1, N))
        assert q_factorial(N, ctx).is_zero()
        assert not q_factorial(N - 1, ctx).is_zero()
        assert q_integer(1, ctx) == ctx.one


def test_q_integer_formula():
    ctx = get_context(5)
    w = ctx.omega(1)
    for n in range(1, 9):
        assert q_integer(n, ctx) * (ctx.one - w) == ctx.one - w**n


def test_embed_complex_precision():
    ctx = get_context(7)
    a = ctx.element([Fraction(1, 3), 2, -1])
    assert abs(embed_complex(a) - a.to_complex()) < 1e-12


def test_tpoly_arithmetic():
    ctx = get_context(3)
    w = ctx.omega(1)
    p = TPoly(ctx, [1, -w])
    q = TPoly(ctx, [1, -1])
    assert (p * q).degree == 2
    assert (p * q).coeff(1) == -(w + 1)
    assert (p - p).degree == -1
    assert abs((p * q)(0.25) - p(0.25) * q(0.25)) < 1e-12
    assert p**0 == TPoly(ctx, [1])


def test_ground_eigenvalue_values():
    ctx = get_context(3)
    eps = ground_eigenvalue(ctx, 3, 0)
    assert eps.coeff(0) == ctx.from_int(2)
    assert eps.degree == 3
    t = 0.5
    w = np.exp(2j * np.pi / 3)
    assert abs(eps(t) - ((1 - w * t) ** 3 + (1 - t) ** 3)) < 1e-12
    eps1 = ground_eigenvalue(ctx, 3, 1)
    assert abs(eps1(t) - ((1 - w * t) ** 3 + w * (1 - t) ** 3)) < 1e-12


def test_context_rejects_small_N():
    with pytest.raises(ValueError):
        get_context(1)
