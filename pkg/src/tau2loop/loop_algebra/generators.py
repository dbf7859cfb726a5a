"""Loop-algebra generators on the charge-0 sector and the Drinfeld coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Mapping

import numpy as np

from ..checks import CheckResult, failed, passed, timed
from ..sparse import SparseOp, commutator
from ..state_space import LatticeConfig
from .divided import divided_power

HALF = Fraction(1, 2)


@dataclass
class LoopGenerators:
    """x_j^-, x_j^+ and h_m as exact operators on the charge-0 sector."""

    config: LatticeConfig
    xminus: dict[int, SparseOp] = field(default_factory=dict)
    xplus: dict[int, SparseOp] = field(default_factory=dict)
    h: dict[int, SparseOp] = field(default_factory=dict)
    log: list[str] = field(default_factory=list)
    checks: list[CheckResult] = field(default_factory=list)

    def get(self, kind: str, j: int) -> SparseOp:
        table = {"x-": self.xminus, "x+": self.xplus, "h": self.h}[kind]
        if j not in table:
            raise KeyError(f"{kind}_{j} not generated (window {sorted(table)})")
        return table[j]

    @property
    def window(self) -> int:
        return min(max(self.xminus), -min(self.xplus))


def _first_mismatch(a: SparseOp, b: SparseOp) -> dict | None:
    d = a - b
    if d.is_zero():
        return None
    i, j, _ = next(d.entries())
    return {"row": i, "col": j, "lhs": str(a.entry(i, j)), "rhs": str(b.entry(i, j))}


def base_generators(config: LatticeConfig, prebuilt: Mapping[str, SparseOp] | None = None) -> LoopGenerators:
    """x_0^-, x_1^-, x_0^+, x_{-1}^+ from the divided powers, and h_0 = [x_0^+, x_0^-].

    ``prebuilt`` may supply the four first divided powers by label. The second
    form h_0 = [x_{-1}^+, x_1^-] is compared and the outcome stored in
    ``checks`` (id ``h0.consistency``).
    """
    prebuilt = prebuilt or {}

    def first(label: str) -> SparseOp:
        return prebuilt[label] if label in prebuilt else divided_power(label, 1, config)

    with timed() as clock:
        g = LoopGenerators(config)
        g.xminus[0] = first("x0minus")
        g.xminus[1] = first("x1minus")
        g.xplus[0] = first("x0plus")
        g.xplus[-1] = first("xm1plus")
        g.h[0] = commutator(g.xplus[0], g.xminus[0])
        alt = commutator(g.xplus[-1], g.xminus[1])
        g.log.append("h0 = [x0+, x0-]")
        params = {"N": config.N, "L": config.L}
        miss = _first_mismatch(g.h[0], alt)
        res = passed("h0.consistency", params) if miss is None else failed("h0.consistency", params, miss)
    res.elapsed = clock[0]
    g.checks.append(res)
    return g


def extend_generators(gens: LoopGenerators, j_max: int) -> LoopGenerators:
    """Fill x_j^+-, h_m for |j|, |m| <= j_max by the loop recursion.

    Uses x_{j}^- = 1/2 [h_1, x_{j-1}^-], x_j^+ = -1/2 [h_1, x_{j-1}^+] upwards and
    the h_{-1} analogues downwards, with h_m = [x_0^+, x_m^-] (m >= 0) and
    h_m = [x_m^+, x_0^-] (m < 0). Independence of the splitting index is then
    tested on every relation that has a second form inside the window; the
    result is appended to ``gens.checks`` as ``loop.l_independence``.
    """
    xm, xp, h = gens.xminus, gens.xplus, gens.h
    with timed() as clock:
        h[1] = commutator(xp[0], xm[1])
        h[-1] = commutator(xp[-1], xm[0])
        for j in range(2, j_max + 1):
            if j not in xm:
                xm[j] = commutator(h[1], xm[j - 1]).scale(HALF)
                gens.log.append(f"x{j}- = 1/2 [h1, x{j - 1}-]")
        for j in range(1, j_max + 1):
            if j not in xp:
                xp[j] = commutator(h[1], xp[j - 1]).scale(-HALF)
                gens.log.append(f"x{j}+ = -1/2 [h1, x{j - 1}+]")
        for j in range(1, j_max + 1):
            if -j not in xm:
                xm[-j] = commutator(h[-1], xm[-j + 1]).scale(HALF)
                gens.log.append(f"x{-j}- = 1/2 [h-1, x{-j + 1}-]")
        for j in range(2, j_max + 1):
            if -j not in xp:
                xp[-j] = commutator(h[-1], xp[-j + 1]).scale(-HALF)
                gens.log.append(f"x{-j}+ = -1/2 [h-1, x{-j + 1}+]")
        for m in range(2, j_max + 1):
            h[m] = commutator(xp[0], xm[m])
            h[-m] = commutator(xp[-m], xm[0])
        res = _l_independence(gens, j_max)
    res.elapsed = clock[0]
    gens.checks.append(res)
    return gens


def _l_independence(gens: LoopGenerators, j_max: int, per_m: int = 2) -> CheckResult:
    xm, xp, h = gens.xminus, gens.xplus, gens.h
    params = {"N": gens.config.N, "L": gens.config.L, "j_max": j_max}
    cases = []
    for m in range(-j_max, j_max + 1):
        # h_m = [x_{m-l}^+, x_l^-] for splittings other than the generating one
        used = m if m >= 0 else 0
        alts = [l for l in range(-j_max, j_max + 1) if l != used and l in xm and (m - l) in xp]
        alts.sort(key=lambda l: (abs(l - used), l))
        for l in alts[:per_m]:
            cases.append((f"h{m} = [x{m - l}+, x{l}-]", h[m], lambda m=m, l=l: commutator(xp[m - l], xm[l])))
    for m in (-1, 0, 1, 2):
        for l in range(-j_max, j_max + 1):
            if abs(m + l) > j_max or abs(l) + abs(m) > j_max:
                continue
            if l in xm and (m + l) in xm:
                cases.append((f"x{m + l}- = 1/2 [h{m}, x{l}-]", xm[m + l], lambda m=m, l=l: commutator(h[m], xm[l]).scale(HALF)))
            if l in xp and (m + l) in xp:
                cases.append((f"x{m + l}+ = -1/2 [h{m}, x{l}+]", xp[m + l], lambda m=m, l=l: commutator(h[m], xp[l]).scale(-HALF)))
    for name, want, build in cases:
        miss = _first_mismatch(want, build())
        if miss is not None:
            miss["relation"] = name
            return failed("loop.l_independence", params, miss, relations=len(cases))
    return passed("loop.l_independence", params, relations=len(cases))


@dataclass(frozen=True)
class DrinfeldData:
    r: int
    lambdas: tuple[int, ...]
    series: tuple[int, ...]
    alternating: tuple[int, ...]

    @property
    def methods_agree(self) -> bool:
        return self.series == self.alternating


def _rising(x: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= x + i
    return out


def lambda_coefficients(config: LatticeConfig) -> DrinfeldData:
    """Lambda_n = coefficient of t^(nN) in (1 + t + ... + t^(N-1))^L, n = 0..r.

    Computed by series expansion and by the alternating sum
    sum_m (-1)^m C(L, m) (L)_{nN-mN} / (nN-mN)! with the rising factorial.
    """
    N, L = config.N, config.L
    r = config.r
    poly = np.array([1], dtype=object)
    for _ in range(L):
        poly = np.convolve(poly, np.ones(N, dtype=object))
    series = tuple(int(poly[n * N]) for n in range(r + 1))
    alt = []
    for n in range(r + 1):
        s = 0
        for m in range(n + 1):
            k = n * N - m * N
            s += (-1) ** m * comb(L, m) * _rising(L, k) // factorial(k)
        alt.append(s)
    return DrinfeldData(r, series, series, tuple(alt))


def check_lambda(config: LatticeConfig) -> CheckResult:
    """Both methods agree, Lambda_0 = Lambda_r = 1, palindromic, sum = N^(L-1)."""
    params = {"N": config.N, "L": config.L}
    with timed() as clock:
        d = lambda_coefficients(config)
        lam = d.alternating
        problems = []
        if not d.methods_agree:
            problems.append({"property": "methods", "series": list(d.series), "alternating": list(lam)})
        if lam[0] != 1 or lam[-1] != 1:
            problems.append({"property": "ends", "lambdas": list(lam)})
        if lam != lam[::-1]:
            problems.append({"property": "palindrome", "lambdas": list(lam)})
        if sum(lam) != config.N ** (config.L - 1):
            problems.append({"property": "sum", "sum": sum(lam), "expected": config.N ** (config.L - 1)})
        res = failed("lambda.tables", params, problems[0]) if problems else passed("lambda.tables", params, lambdas=list(lam))
    res.elapsed = clock[0]
    return res
