from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tau2loop.loop_algebra import Workspace, lambda_coefficients
from tau2loop.sl2_decomp import (
    DecompositionError,
    cluster_eigenvalues,
    decompose,
    drinfeld_roots,
    eigenvalue_multiplicity,
    numerical_rank,
    spectrum,
)
from tau2loop.state_space import LatticeConfig


def test_roots_of_z2_7z_1():
    rs = drinfeld_roots(lambda_coefficients(LatticeConfig(3, 3)))
    want = sorted([(-7 - 3 * math.sqrt(5)) / 2, (-7 + 3 * math.sqrt(5)) / 2])
    assert np.allclose(sorted(rs.roots.real), want, rtol=0, atol=1e-10)
    assert np.all(np.abs(rs.roots.imag) < 1e-12)


@given(st.integers(2, 5), st.integers(1, 3))
def test_vieta(N, k):
    d = lambda_coefficients(LatticeConfig(N, N * k))
    z = drinfeld_roots(d).roots
    lam = d.lambdas
    # palindromic, monic up to Lambda_r = 1: product of roots = (-1)^r Lambda_0
    assert abs(np.prod(z) - (-1) ** d.r * lam[0]) < 1e-8 * max(1.0, abs(np.prod(z)))
    assert abs(np.sum(z) + lam[-2]) < 1e-8 * max(1.0, lam[-2])


def test_repeated_root_aborts():
    with pytest.raises(DecompositionError):
        drinfeld_roots([1, 2, 1])


def test_r1_generator_is_E():
    out = decompose(LatticeConfig(2, 2))
    dec = out.decomposition
    assert dec.r == 1
    assert abs((dec.Eminus[0] - dec.xminus[0]).toarray()).max() < 1e-12
    assert all(c.status == "pass" for c in out.checks)


@pytest.fixture(scope="module")
def dec33():
    ws = Workspace(LatticeConfig(3, 3))
    return ws, decompose(ws.config, ws=ws)


def test_r2_closed_form(dec33):
    _, out = dec33
    dec = out.decomposition
    z1, z2 = dec.roots.roots
    x0, x1 = dec.xminus[0].toarray(), dec.xminus[1].toarray()
    E1 = (z2 * x0 - x1) / (z2 - z1)
    E2 = (z1 * x0 - x1) / (z1 - z2)
    assert np.abs(dec.Eminus[0].toarray() - E1).max() < 1e-9 * np.abs(x1).max()
    assert np.abs(dec.Eminus[1].toarray() - E2).max() < 1e-9 * np.abs(x1).max()


def test_checks_at_33(dec33):
    _, out = dec33
    status = {c.id: c for c in out.checks}
    assert {k: v.status for k, v in status.items()} == {
        "sl2.relations": "pass", "sl2.nilpotency": "pass", "sl2.eigenspace": "pass"
    }
    assert status["sl2.eigenspace"].details["rank"] == 4
    assert status["sl2.eigenspace"].details["multiplicities"] == [4, 4]


def test_spectrum_multiplicity_and_csv():
    tab = spectrum(LatticeConfig(3, 3), 0.5)
    assert tab.target.multiplicity == 4
    assert abs(tab.target.eigenvalue - ((1 - np.exp(2j * np.pi / 3) * 0.5) ** 3 + 0.5**3)) < 1e-12
    lines = tab.to_csv().splitlines()
    assert lines[0] == "t_re,t_im,Q,eigenvalue_re,eigenvalue_im,multiplicity"
    assert sum(int(l.split(",")[-1]) for l in lines[1:]) == 9


def test_spectrum_at_t_zero():
    # tau_2(0) = 2 on the sector
    tab = spectrum(LatticeConfig(3, 3), 0)
    assert tab.rows == [(2 + 0j, 9)]
    assert tab.target.multiplicity == 9


def test_spectrum_refuses_large():
    with pytest.raises(ValueError):
        spectrum(LatticeConfig(3, 9), 0.5)


def test_decompose_requires_loop():
    with pytest.raises(ValueError):
        decompose(LatticeConfig(3, 4))


def test_multiplicity_helpers():
    T = np.diag([1.0, 1.0, 2.0])
    T[0, 1] = 1.0  # Jordan block: geometric 1, algebraic 2
    assert eigenvalue_multiplicity(T, 1.0) == 1
    assert cluster_eigenvalues(np.linalg.eigvals(T), 1e-6) == [(1 + 0j, 2), (2 + 0j, 1)]
    rank, _, _ = numerical_rank(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert rank == 1
