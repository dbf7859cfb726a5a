"""Exact arithmetic in the cyclotomic field Q(omega), omega = exp(2 pi i / N).

Elements are stored as coefficient vectors over the power basis
1, omega, ..., omega^(phi-1), reduced modulo the N-th cyclotomic polynomial,
so equality and zero tests are canonical.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Sequence, Union

import numpy as np

Rational = Union[int, Fraction]


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _int_poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        c, rem = divmod(num[k + len(den) - 1], lead)
        if rem:
            raise ArithmeticError("inexact polynomial division")
        out[k] = c
        for i, d in enumerate(den):
            num[k + i] -= c * d
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def _cyclotomic_tuple(N: int) -> tuple[int, ...]:
    p = [-1] + [0] * (N - 1) + [1]
    for d in range(1, N):
        if N % d == 0:
            p = _int_poly_divexact(p, list(_cyclotomic_tuple(d)))
    return tuple(p)


def cyclotomic_polynomial(N: int) -> list[int]:
    """Integer coefficients (constant term first) of the N-th cyclotomic polynomial.

    Obtained by exact division of x^N - 1 by Phi_d for every proper divisor d.
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    return list(_cyclotomic_tuple(N))


class CycloContext:
    """Shared data for Q(omega) at a fixed N: modulus, reduction and multiplication tables."""

    def __init__(self, N: int) -> None:
        if N < 2:
            raise ValueError(f"N must be >= 2, got {N}")
        self.N = N
        self.modulus_coeffs: tuple[int, ...] = _cyclotomic_tuple(N)
        self.phi = len(self.modulus_coeffs) - 1
        top = max(2 * self.phi - 1, N)
        table = []
        for s in range(top):
            table.append(tuple(self._reduce_int([0] * s + [1])))
        # power_table[s] = coefficients of omega^s, s < max(2 phi - 1, N)
        self.power_table: tuple[tuple[int, ...], ...] = tuple(table)
        # omega_matrix @ coeffs(a) = coeffs(omega * a)
        W = np.zeros((self.phi, self.phi), dtype=np.int64)
        for k in range(self.phi):
            W[:, k] = table[k + 1]
        self.omega_matrix = W
        # reduce_matrix[s] = coeffs(omega^s) for s in 0..N-1, shape (N, phi)
        self.reduce_matrix = np.array(table[:N], dtype=np.int64)
        self.roots = np.exp(2j * np.pi * np.arange(self.phi) / N)

    def _reduce_int(self, p: list) -> list:
        p = list(p)
        m = self.modulus_coeffs
        d = self.phi
        for k in range(len(p) - 1, d - 1, -1):
            c = p[k]
            if c:
                for i in range(d + 1):
                    p[k - d + i] -= c * m[i]
        p = p[:d]
        return p + [0] * (d - len(p))

    def reduce(self, p: Sequence) -> list:
        """Reduce an arbitrary-length coefficient list modulo Phi_N."""
        return self._reduce_int(list(p))

    # constructors
    def element(self, coeffs: Iterable[Rational]) -> "Cyclotomic":
        return Cyclotomic(self, self.reduce([Fraction(c) for c in coeffs]))

    def from_int(self, n: Rational) -> "Cyclotomic":
        return Cyclotomic(self, [Fraction(n)] + [Fraction(0)] * (self.phi - 1))

    def omega(self, k: int = 1) -> "Cyclotomic":
        return Cyclotomic(self, [Fraction(c) for c in self.power_table[k % self.N]])

    @property
    def zero(self) -> "Cyclotomic":
        return self.from_int(0)

    @property
    def one(self) -> "Cyclotomic":
        return self.from_int(1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CycloContext) and other.N == self.N

    def __hash__(self) -> int:
        return hash(("CycloContext", self.N))

    def __repr__(self) -> str:
        return f"CycloContext(N={self.N}, phi={self.phi})"


@lru_cache(maxsize=None)
def get_context(N: int) -> CycloContext:
    return CycloContext(N)


class Cyclotomic:
    """Immutable element of Q(omega) in the reduced power basis."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: CycloContext, coeffs: Sequence[Rational]) -> None:
        if len(coeffs) != ctx.phi:
            raise ValueError(f"expected {ctx.phi} coefficients, got {len(coeffs)}")
        self.ctx = ctx
        self.coeffs: tuple[Fraction, ...] = tuple(Fraction(c) for c in coeffs)

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.ctx.N != self.ctx.N:
                raise ValueError(f"context mismatch: N={self.ctx.N} vs N={other.ctx.N}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.from_int(other)
        return NotImplemented

    def __add__(self, other) -> "Cyclotomic":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.ctx, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.ctx, [-a for a in self.coeffs])

    def __sub__(self, other) -> "Cyclotomic":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.ctx, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other) -> "Cyclotomic":
        return (-self) + other

    def __mul__(self, other) -> "Cyclotomic":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        prod = [Fraction(0)] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(self.ctx, self.ctx.reduce(prod))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Cyclotomic":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Cyclotomic":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Cyclotomic":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.ctx.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "Cyclotomic":
        """Multiplicative inverse by the extended Euclidean algorithm against Phi_N."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(omega)")
        # invariant: s * a == r (mod Phi_N)
        r0 = [Fraction(c) for c in self.ctx.modulus_coeffs]
        r1 = _trim(list(self.coeffs))
        s0: list = []
        s1: list = [Fraction(1)]
        while len(r1) > 1:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        c = r1[0]
        return Cyclotomic(self.ctx, self.ctx.reduce([x / c for x in s1]))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ctx.from_int(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.ctx.N == other.ctx.N and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ctx.N, self.coeffs))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_complex(self) -> complex:
        return complex(sum(float(c) * z for c, z in zip(self.coeffs, self.ctx.roots)))

    def denominator(self) -> int:
        return lcm(*(c.denominator for c in self.coeffs))

    def to_strings(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_strings(cls, ctx: CycloContext, items: Sequence[str]) -> "Cyclotomic":
        return cls(ctx, [Fraction(s) for s in items])

    def __repr__(self) -> str:
        return f"Cyclotomic(N={self.ctx.N}, {self})"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("w" if k == 1 else f"w^{k}")
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        c = a[-1] / b[-1]
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            a[k + i] -= c * y
        _trim(a)
    return _trim(q), a


def cyclo_mul(a: Cyclotomic, b: Cyclotomic) -> Cyclotomic:
    return a * b


def cyclo_add(a: Cyclotomic, b: Cyclotomic) -> Cyclotomic:
    return a + b


def cyclo_neg(a: Cyclotomic) -> Cyclotomic:
    return -a


def cyclo_inverse(a: Cyclotomic) -> Cyclotomic:
    return a.inverse()


def q_integer(n: int, ctx: CycloContext) -> Cyclotomic:
    """[n] = 1 + omega + ... + omega^(n-1); [0] = 0."""
    if n < 0:
        raise ValueError("q_integer needs n >= 0")
    acc = [0] * ctx.N
    for k in range(n):
        acc[k % ctx.N] += 1
    return ctx.element(acc)


def q_factorial(n: int, ctx: CycloContext) -> Cyclotomic:
    """[n]! = [n][n-1]...[1]; vanishes for n >= N."""
    out = ctx.one
    for k in range(1, n + 1):
        out = out * q_integer(k, ctx)
    return out


def embed_complex(a: Cyclotomic, precision: int | None = None) -> complex:
    """Image of ``a`` under omega -> exp(2 pi i / N), in double precision.

    ``precision`` is accepted for interface symmetry; only doubles are produced.
    """
    z = cmath.exp(2j * cmath.pi / a.ctx.N)
    return complex(sum(float(c) * z**k for k, c in enumerate(a.coeffs)))


class TPoly:
    """Polynomial in the formal spectral variable t with Q(omega) coefficients."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: CycloContext, coeffs: Sequence[Cyclotomic | Rational]) -> None:
        self.ctx = ctx
        cs = [c if isinstance(c, Cyclotomic) else ctx.from_int(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[Cyclotomic, ...] = tuple(cs)

    @classmethod
    def linear(cls, ctx: CycloContext, c0, c1) -> "TPoly":
        return cls(ctx, [c0, c1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, j: int) -> Cyclotomic:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else self.ctx.zero

    def __add__(self, other: "TPoly") -> "TPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return TPoly(self.ctx, [self.coeff(j) + other.coeff(j) for j in range(n)])

    def __neg__(self) -> "TPoly":
        return TPoly(self.ctx, [-c for c in self.coeffs])

    def __sub__(self, other: "TPoly") -> "TPoly":
        return self + (-other)

    def __mul__(self, other) -> "TPoly":
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return TPoly(self.ctx, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return TPoly(self.ctx, [])
        out = [self.ctx.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return TPoly(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TPoly":
        out = TPoly(self.ctx, [1])
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __call__(self, t: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * t + c.to_complex()
        return acc

    def __repr__(self) -> str:
        return "TPoly[" + ", ".join(str(c) for c in self.coeffs) + "]"


def ground_eigenvalue(ctx: CycloContext, L: int, Q: int) -> TPoly:
    """eps_Q(t) = (1 - omega t)^L + omega^Q (1 - t)^L."""
    a = TPoly(ctx, [ctx.one, -ctx.omega(1)]) ** L
    b = TPoly(ctx, [1, -1]) ** L
    return a + b * ctx.omega(Q)
