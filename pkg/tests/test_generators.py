from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tau2loop.loop_algebra import (
    Workspace,
    check_lambda,
    lambda_coefficients,
)
from tau2loop.sparse import commutator
from tau2loop.state_space import LatticeConfig


@pytest.mark.parametrize(
    "N, L, table",
    [
        (2, 2, (1, 1)),
        (3, 3, (1, 7, 1)),
        (3, 6, (1, 50, 141, 50, 1)),
        (4, 4, (1, 31, 31, 1)),
        (2, 4, (1, 6, 1)),
    ],
)
def test_lambda_tables(N, L, table):
    d = lambda_coefficients(LatticeConfig(N, L))
    assert d.lambdas == table
    assert d.methods_agree and d.r == len(table) - 1


@given(st.integers(2, 6), st.integers(1, 4))
def test_lambda_properties(N, k):
    cfg = LatticeConfig(N, N * k)
    assert check_lambda(cfg).status == "pass"
    d = lambda_coefficients(cfg)
    assert sum(d.lambdas) == N ** (cfg.L - 1)


@pytest.mark.parametrize("N, L", [(2, 2), (2, 4), (3, 3), (3, 6)])
def test_h0_two_forms_and_l_independence(N, L):
    ws = Workspace(LatticeConfig(N, L))
    g = ws.extended(LatticeConfig(N, L).r)
    ids = {c.id: c.status for c in g.checks}
    assert ids == {"h0.consistency": "pass", "loop.l_independence": "pass"}


def test_loop_recursion_definitions():
    ws = Workspace(LatticeConfig(3, 3))
    g = ws.extended(3)
    assert g.h[2] == commutator(g.xplus[0], g.xminus[2])
    assert g.h[-2] == commutator(g.xplus[-2], g.xminus[0])
    assert g.window == 3
    with pytest.raises(KeyError):
        g.get("x-", 9)


def test_workspace_cache_dir(tmp_path):
    cfg = LatticeConfig(3, 3)
    a = Workspace(cfg, cache_dir=tmp_path).dp("x0minus", 1)
    assert list(tmp_path.glob("*.json"))
    b = Workspace(cfg, cache_dir=tmp_path).dp("x0minus", 1)
    assert a == b
