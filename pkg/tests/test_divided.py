from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tau2loop.exact_arith import get_context, q_factorial
from tau2loop.loop_algebra import (
    BOUNDARY_OF,
    GEN_LABELS,
    boundary_divided_power,
    check_divided_power_oracle,
    composition_sum,
    divided_power,
    gaussian_binomial,
)
from tau2loop.sparse import SparseOp
from tau2loop.state_space import LatticeConfig
from tau2loop.transfer_ops import boundary_coefficients


def _poly_eval(coeffs, q):
    return sum(c * q**i for i, c in enumerate(coeffs))


@given(st.integers(0, 9), st.data())
def test_gaussian_binomial(n, data):
    k = data.draw(st.integers(0, n))
    g = gaussian_binomial(n, k)
    from math import comb

    assert _poly_eval(g, 1) == comb(n, k)
    assert g == g[::-1]
    if 0 < k < n:
        # q-Pascal rule
        a = gaussian_binomial(n - 1, k - 1)
        b = gaussian_binomial(n - 1, k)
        for q in (2, 3):
            assert _poly_eval(g, q) == _poly_eval(a, q) + q**k * _poly_eval(b, q)


@pytest.mark.parametrize("N, L", [(2, 3), (3, 3), (3, 2), (4, 2)])
@pytest.mark.parametrize("label", GEN_LABELS)
def test_literal_powers_below_N(N, L, label):
    cfg = LatticeConfig(N, L)
    ctx = get_context(N)
    B = boundary_coefficients(cfg)[BOUNDARY_OF[label]]
    for k in range(1, N):
        lhs = boundary_divided_power(cfg, label, k).scale(q_factorial(k, ctx))
        assert lhs == B**k


@pytest.mark.parametrize("N, L", [(2, 2), (3, 3), (4, 2)])
@pytest.mark.parametrize("label", GEN_LABELS)
def test_Nth_power_vanishes(N, L, label):
    cfg = LatticeConfig(N, L)
    B = boundary_coefficients(cfg)[BOUNDARY_OF[label]]
    assert (B**N).is_zero()
    assert not composition_sum(cfg, label, N).is_zero()


@pytest.mark.parametrize("N, L", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)])
def test_generic_q_oracle(N, L):
    assert check_divided_power_oracle(LatticeConfig(N, L)).status == "pass"


def test_generic_q_oracle_second_power():
    assert check_divided_power_oracle(LatticeConfig(2, 4), n_max=2).status == "pass"


def test_oracle_skips_large():
    res = check_divided_power_oracle(LatticeConfig(3, 6))
    assert res.status == "skip" and res.witness == {"reason": "N^L > 30"}


def test_divided_power_shapes_and_zero():
    cfg = LatticeConfig(3, 3)
    x = divided_power("x0minus", 1, cfg)
    assert x.shape == (9, 9)
    assert divided_power("x0minus", 0, cfg) == SparseOp.identity(get_context(3), 9)
    assert divided_power("x0minus", cfg.L, cfg).is_zero()  # total exceeds (N-1) L


def test_bad_inputs():
    cfg = LatticeConfig(3, 3)
    with pytest.raises(ValueError):
        composition_sum(cfg, "nope", 1)
    with pytest.raises(ValueError):
        divided_power("x0minus", 1, LatticeConfig(3, 4))
    with pytest.raises(ValueError):
        divided_power("x0minus", -1, cfg)
