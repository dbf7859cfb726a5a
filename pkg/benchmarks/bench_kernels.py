"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--N 4 --L 8] [--repeat 3]

Times the composition-sum entries for x0minus and x1minus at total N on the
charge-0 sector, plus an exact int64 matvec, and checks that both backends
return identical arrays.
"""

from __future__ import annotations

import argparse
import time

import numpy as np
import scipy.sparse as sp

from tau2loop import _kernels_py
from tau2loop.loop_algebra.divided import _KINDS, _weights, gauss_table
from tau2loop.state_space import LatticeConfig, sector_basis

try:
    from tau2loop import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def entries(mod, cfg: LatticeConfig, label: str):
    kind = _KINDS[label]
    digits = np.ascontiguousarray(cfg.digits[sector_basis(cfg, 0)])
    comps = mod.compositions(cfg.N, cfg.L, cfg.N - 1)
    return mod.divided_power_entries(
        cfg.N, digits, comps, gauss_table(cfg.N, kind.raising), kind.raising, kind.suffix, _weights(kind, cfg.N, cfg.L)
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--L", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cfg = LatticeConfig(args.N, args.L)
    backends = [("python", _kernels_py)] + ([("cython", compiled)] if compiled is not None else [])
    if compiled is None:
        print("compiled extension not available; timing the fallback only")

    print(f"N={cfg.N} L={cfg.L} sector dim {cfg.sector_dim}")
    for label in ("x0minus", "x1minus"):
        results = {}
        for name, mod in backends:
            dt, out = best_of(lambda: entries(mod, cfg, label), args.repeat)
            results[name] = (dt, [np.asarray(a) for a in out])
            print(f"  divided_power_entries {label:8s} {name:7s} {dt * 1e3:9.2f} ms  ({len(out[0])} terms)")
        if len(results) == 2:
            a, b = results["python"][1], results["cython"][1]
            assert all(np.array_equal(x, y) for x, y in zip(a, b)), "backends disagree"
            print(f"  speedup {results['python'][0] / results['cython'][0]:.1f}x")

    rng = np.random.default_rng(0)
    n = cfg.sector_dim
    A = sp.random(n, n, density=min(1.0, 40 / n), random_state=1, format="csr")
    A.data = rng.integers(-1000, 1000, size=A.nnz).astype(np.int64)
    A = A.astype(np.int64)
    x = rng.integers(-1000, 1000, size=n).astype(np.int64)
    args_mv = (A.indptr.astype(np.int64), A.indices.astype(np.int64), A.data, x)
    for name, mod in backends:
        dt, y = best_of(lambda: mod.csr_matvec_checked(*args_mv), args.repeat)
        assert np.array_equal(np.asarray(y), A @ x)
        print(f"  csr_matvec_checked           {name:7s} {dt * 1e3:9.2f} ms  (nnz {A.nnz})")


if __name__ == "__main__":
    main()
