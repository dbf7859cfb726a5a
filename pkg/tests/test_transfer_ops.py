from __future__ import annotations

import json

import numpy as np
import pytest

from tau2loop.exact_arith import TPoly, get_context
from tau2loop.sparse import SparseOp
from tau2loop.state_space import LatticeConfig, rank
from tau2loop.transfer_ops import (
    OpPoly,
    _face_weight,
    cache_path,
    cached_operator,
    check_boundary_coefficients,
    check_charge_grading,
    check_ground_eigenvalues,
    face_operator,
    fourier_consistency,
    load_operator,
    lowering_e,
    monodromy,
    poly_commutator,
    raising_f,
    save_operator,
    site_x,
    site_z,
    spin_transfer,
    tau2_edge,
)

SMALL = [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)]


@pytest.mark.parametrize("N, L", SMALL)
def test_site_algebra(N, L):
    cfg = LatticeConfig(N, L)
    ctx = get_context(N)
    I = SparseOp.identity(ctx, cfg.dim)
    for j in range(1, L + 1):
        Z, X = site_z(cfg, j), site_x(cfg, j)
        assert Z**N == I and X**N == I
        assert Z @ X == (X @ Z).scale(ctx.omega(1))
        e, f = lowering_e(cfg, j), raising_f(cfg, j)
        assert (e**N).is_zero() and (f**N).is_zero()


@pytest.mark.parametrize("N, L", SMALL + [(3, 4)])
def test_monodromy_checks(N, L):
    cfg = LatticeConfig(N, L)
    blocks = monodromy(cfg)
    assert check_boundary_coefficients(cfg, blocks).status == "pass"
    assert check_charge_grading(cfg, blocks).status == "pass"
    for Q in range(N):
        assert check_ground_eigenvalues(cfg.with_Q(Q), blocks).status == "pass"


def test_single_site_face():
    cfg = LatticeConfig(3, 1)
    u = face_operator(cfg, 1)
    blocks = monodromy(cfg)
    assert blocks.A == u[0][0] and blocks.D == u[1][1]


def test_spin_transfer_matches_face_products():
    N, L = 3, 3
    cfg = LatticeConfig(N, L)
    ctx = get_context(N)
    table = spin_transfer(cfg)
    rng = np.random.default_rng(5)
    for _ in range(12):
        sigma = rng.integers(0, N, size=L)
        alpha = rng.integers(0, 2, size=L)
        w = TPoly(ctx, [ctx.one])
        for J in range(L):
            K = (J + 1) % L
            w = w * _face_weight(ctx, int(alpha[J]), int(alpha[K]), int((sigma[J] - sigma[K]) % N))
        key = (rank((sigma - alpha) % N, cfg), rank(sigma, cfg))
        got = table.get(key, TPoly(ctx, []))
        assert got == w


@pytest.mark.parametrize("N, L", [(2, 2), (3, 2), (3, 3), (2, 4)])
def test_fourier_consistency(N, L):
    assert fourier_consistency(LatticeConfig(N, L)).status == "pass"


def test_fourier_consistency_refuses_large():
    with pytest.raises(ValueError):
        fourier_consistency(LatticeConfig(3, 8), max_dim=100)


def test_oppoly_algebra():
    cfg = LatticeConfig(2, 2)
    ctx = get_context(2)
    tau = tau2_edge(cfg)
    assert poly_commutator(tau, tau).is_zero()
    I = SparseOp.identity(ctx, cfg.dim)
    p = OpPoly.constant(I)
    assert (p @ tau) == tau
    assert (tau - tau).is_zero()
    assert tau.shift(1).degree == tau.degree + 1
    assert tau.first_difference(tau) is None
    assert tau.first_difference(tau.scale(ctx.from_int(2))) is not None


@pytest.mark.parametrize("Q", [0, 1])
def test_tau2_coefficients_commute(Q):
    # [tau_2(t), tau_2(t')] = 0 for all t, t'
    tau = tau2_edge(LatticeConfig(3, 3, Q))
    for i in range(tau.degree + 1):
        for j in range(i):
            a, b = tau.coeff(i), tau.coeff(j)
            assert a @ b == b @ a


def test_operator_cache_roundtrip(tmp_path):
    cfg = LatticeConfig(3, 3)
    op = raising_f(cfg, 2).scale(get_context(3).omega(1))
    path = tmp_path / "op.json"
    save_operator(path, op, cfg, "f2")
    assert load_operator(path, cfg, "f2") == op
    with pytest.raises(ValueError):
        load_operator(path, LatticeConfig(3, 2), "f2")


def test_cached_operator_builds_once_and_rebuilds_corrupt(tmp_path):
    cfg = LatticeConfig(2, 3)
    calls = []

    def build():
        calls.append(1)
        return site_z(cfg, 1)

    a = cached_operator(tmp_path, cfg, "z1", build)
    b = cached_operator(tmp_path, cfg, "z1", build)
    assert a == b and len(calls) == 1
    path = cache_path(tmp_path, cfg, "z1")
    path.write_text("{not json")
    c = cached_operator(tmp_path, cfg, "z1", build)
    assert c == a and len(calls) == 2
    doc = json.loads(path.read_text())
    assert doc["name"] == "z1"
    assert cached_operator(None, cfg, "z1", build) == a
