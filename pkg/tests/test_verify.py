from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tau2loop.loop_algebra import (
    RELATIONS,
    Workspace,
    check_adq_eigen,
    check_adq_identities,
    check_comm_full,
    check_comm_sector,
    sample_positions,
    splitmix64,
    verify_highest_weight,
    verify_induction_and_finiteness,
    verify_partial_serre,
    verify_serre,
)
from tau2loop.loop_algebra.verify import serre_expr
from tau2loop.state_space import LatticeConfig


def test_serre_expansion():
    e = serre_expr("a", "b")
    assert e == {"aaab": 1, "aaba": -3, "abaa": 3, "baaa": -1}
    assert len(RELATIONS) == 8


def test_splitmix64_reference_values():
    g = splitmix64(0)
    assert next(g) == 0xE220A8397B1DCDAF
    assert next(g) == 0x6E789E6AA1B965F4
    assert next(splitmix64(1)) != 0xE220A8397B1DCDAF


@given(st.integers(1, 500), st.integers(0, 600), st.integers(0, 2**64 - 1))
def test_sample_positions(n, count, seed):
    out = sample_positions(n, count, seed)
    assert len(out) == min(n, count)
    assert len(set(out)) == len(out)
    assert all(0 <= k < n for k in out)
    assert out == sample_positions(n, count, seed)


@pytest.fixture(scope="module")
def ws33():
    return Workspace(LatticeConfig(3, 3))


def test_serre_exhaustive_small(ws33):
    res = verify_serre(ws33.config, ws=ws33)
    assert res.status == "pass" and res.details["states_checked"] == 9


def test_serre_sampled_and_explicit(ws33):
    assert verify_serre(ws33.config, samples=4, seed=3, ws=ws33).status == "pass"
    assert verify_serre(ws33.config, ws=ws33, states=[0, 8]).id == "serre.q0.states"


def test_serre_skips_without_loop():
    res = verify_serre(LatticeConfig(3, 4))
    assert res.status == "skip" and res.witness["reason"] == "L not multiple of N"


def test_partial_serre(ws33):
    assert verify_partial_serre(ws33.config, 1, ws33).status == "pass"


def test_printed_commutation_has_witness_and_corrected_form_passes(ws33):
    printed = check_comm_full(ws33.config, ws33)
    assert printed.status == "fail"
    assert printed.details["lines"] == {"B_L": "pass", "B_1": "fail", "C_0": "fail", "C_{L-1}": "pass"}
    w = printed.witness
    assert w["identity"] == "B_1" and w["lhs"] == "-" + w["rhs"]
    assert check_comm_full(ws33.config, ws33, corrected=True).status == "pass"
    assert check_comm_sector(ws33.config, ws33).status == "pass"


def test_printed_commutation_at_N2():
    ws = Workspace(LatticeConfig(2, 2))
    assert check_comm_full(ws.config, ws).status == "pass"


def test_highest_weight_and_finiteness(ws33):
    assert verify_highest_weight(ws33.config, ws33).status == "pass"
    assert all(r.status == "pass" for r in verify_induction_and_finiteness(ws33.config, ws33))


@pytest.mark.parametrize("m", [1, 2])
def test_adq_printed_and_corrected(ws33, m):
    assert check_adq_identities(ws33.config, m, ws33).status == "fail"
    assert check_adq_identities(ws33.config, m, ws33, corrected=True).status == "pass"


@pytest.mark.parametrize("Q", [1, 2])
def test_adq_eigen(ws33, Q):
    assert check_adq_eigen(ws33.config, Q, ws33).status == "pass"


def test_adq_rejects_bad_m(ws33):
    with pytest.raises(ValueError):
        check_adq_identities(ws33.config, 0, ws33)
