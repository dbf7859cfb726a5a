from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tau2loop.state_space import (
    EdgeState,
    LatticeConfig,
    charge,
    ground_states,
    rank,
    sector_basis,
    sector_index,
    unrank,
)

configs = st.builds(LatticeConfig, st.integers(2, 5), st.integers(1, 5))


@given(configs, st.data())
def test_rank_unrank_roundtrip(cfg, data):
    i = data.draw(st.integers(0, cfg.dim - 1))
    s = unrank(i, cfg)
    assert rank(s, cfg) == i
    assert list(cfg.digits[i]) == list(s.n)


def test_first_edge_is_most_significant():
    cfg = LatticeConfig(3, 3)
    assert rank((1, 0, 0), cfg) == 9
    assert rank(EdgeState([0, 0, 2]), cfg) == 2


@given(configs)
def test_sectors_partition_space(cfg):
    sizes = [len(sector_basis(cfg, c)) for c in range(cfg.N)]
    assert sizes == [cfg.sector_dim] * cfg.N
    allr = np.concatenate([sector_basis(cfg, c) for c in range(cfg.N)])
    assert sorted(allr.tolist()) == list(range(cfg.dim))


@given(configs)
def test_sector_index_inverts_basis(cfg):
    b = sector_basis(cfg, 0)
    idx = sector_index(cfg, 0)
    assert np.array_equal(idx[b], np.arange(len(b)))
    assert np.all(idx[cfg.charges != 0] == -1)


def test_ground_states():
    cfg = LatticeConfig(3, 6)
    lo, hi = ground_states(cfg)
    assert unrank(lo, cfg).n == (0,) * 6
    assert unrank(hi, cfg).n == (2,) * 6
    assert charge(unrank(hi, cfg), 3) == 0


def test_r_and_loop_condition():
    assert LatticeConfig(3, 6).r == 4
    assert LatticeConfig(4, 8).r == 6
    assert not LatticeConfig(3, 4).loop_ok
    with pytest.raises(ValueError):
        LatticeConfig(3, 4).r


@pytest.mark.parametrize("args", [(1, 3), (3, 0), (3, 3, 3), (3, 3, -1)])
def test_invalid_configs(args):
    with pytest.raises(ValueError):
        LatticeConfig(*args)


def test_invalid_states():
    cfg = LatticeConfig(3, 3)
    with pytest.raises(ValueError):
        rank((0, 0), cfg)
    with pytest.raises(ValueError):
        rank((0, 3, 0), cfg)
    with pytest.raises(IndexError):
        unrank(27, cfg)
    with pytest.raises(ValueError):
        sector_basis(cfg, 3)
