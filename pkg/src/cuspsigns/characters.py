"""Dirichlet characters mod m with exact root-of-unity values.

The unit group mod m is decomposed into cyclic factors: one generator
per odd prime-power divisor (a primitive root), and for the 2-part
either nothing (2), the class of -1 (4), or the pair -1, 5 (higher
powers of 2).  A character is indexed by its exponent tuple against
those generators, and its values are powers of a fixed root of unity
zeta_D where D is the group exponent.  No floating point enters until a
caller explicitly asks for a complex rendering.

Rationality of character sums is decided exactly: a sum of roots of
unity, collected as a coefficient vector on the powers of zeta_D, is
reduced modulo the D-th cyclotomic polynomial; the sum is rational iff
everything but the constant term of the remainder vanishes.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import numpy as np

from .errors import IntegrityError
from .qseries import IntSeries


@dataclass(frozen=True)
class CharValue:
    """Exact character value: zeta_order ** num, or the distinguished zero."""

    num: int
    order: int
    zero: bool = False

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        if not self.zero and not 0 <= self.num < self.order:
            raise ValueError("numerator must be reduced mod order")

    @staticmethod
    def root(num: int, order: int) -> "CharValue":
        return CharValue(num % order, order)

    @staticmethod
    def nought(order: int) -> "CharValue":
        return CharValue(0, order, zero=True)

    def mul(self, other: "CharValue") -> "CharValue":
        d = lcm(self.order, other.order)
        if self.zero or other.zero:
            return CharValue.nought(d)
        t = self.num * (d // self.order) + other.num * (d // other.order)
        return CharValue(t % d, d)

    def conj(self) -> "CharValue":
        if self.zero:
            return self
        return CharValue((-self.num) % self.order, self.order)

    def to_complex(self) -> complex:
        if self.zero:
            return 0j
        # Quarter turns come out exact instead of through exp().
        q, r = divmod(4 * self.num, self.order)
        if r == 0:
            return (1 + 0j, 1j, -1 + 0j, -1j)[q % 4]
        return cmath.exp(2j * cmath.pi * self.num / self.order)


def _multiplicative_order(g: int, m: int, group_order: int) -> int:
    order = group_order
    for q in _prime_divisors(group_order):
        while order % q == 0 and pow(g, order // q, m) == 1:
            order //= q
    return order


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _primitive_root(pk: int, phi: int) -> int:
    for g in range(2, pk):
        if gcd(g, pk) != 1:
            continue
        if _multiplicative_order(g, pk, phi) == phi:
            return g
    raise IntegrityError(f"no primitive root found mod {pk}")


def _factorize_small(m: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


@dataclass(frozen=True)
class CharacterTable:
    """All phi(m) Dirichlet characters mod m.

    generators are already lifted to units mod m (congruent to 1 at every
    other prime-power factor); log_table maps each unit residue to its
    exponent tuple against them; exponent is the lcm of the generator
    orders, so every character value is a power of zeta_exponent.
    """

    modulus: int
    order: int  # phi(m)
    generators: tuple[tuple[int, int], ...]  # (lifted generator, its order)
    log_table: dict[int, tuple[int, ...]]
    exponent: int


def build_table(m: int) -> CharacterTable:
    """Character table mod m via the cyclic decomposition of the unit group."""
    if m < 1:
        raise ValueError("modulus must be positive")
    gens: list[tuple[int, int]] = []  # (generator mod its own factor, order)
    factors: list[int] = []
    for p, a in _factorize_small(m):
        pk = p**a
        if p == 2:
            if a == 2:
                gens.append((3, 2))
                factors.append(pk)
            elif a >= 3:
                gens.append((pk - 1, 2))
                factors.append(pk)
                gens.append((5, 2 ** (a - 2)))
                factors.append(pk)
            # a == 1 contributes the trivial group.
        else:
            phi = pk - pk // p
            gens.append((_primitive_root(pk, phi), phi))
            factors.append(pk)
    # CRT-lift each generator g mod pk to a unit mod m that is 1 elsewhere.
    lifted: list[tuple[int, int]] = []
    for (g, order), pk in zip(gens, factors):
        rest = m // pk
        if rest == 1:
            u = g % m
        else:
            inv = pow(rest, -1, pk)
            u = (1 + rest * inv * (g - 1)) % m
        lifted.append((u, order))
    logs: dict[int, tuple[int, ...]] = {}
    orders = [o for _, o in lifted]
    for exps in itertools.product(*(range(o) for o in orders)):
        u = 1 % m
        for (g, _), e in zip(lifted, exps):
            u = u * pow(g, e, m) % m
        if u in logs:
            raise IntegrityError(f"unit {u} mod {m} reached by two exponent tuples")
        logs[u] = exps
    phi_m = sum(1 for n in range(m) if gcd(n if n else m, m) == 1) if m > 1 else 1
    if len(logs) != phi_m:
        raise IntegrityError(
            f"decomposition mod {m} produced {len(logs)} units, expected {phi_m}"
        )
    exponent = 1
    for o in orders:
        exponent = lcm(exponent, o)
    return CharacterTable(m, phi_m, tuple(lifted), logs, exponent)


def _decode_index(table: CharacterTable, r: int) -> tuple[int, ...]:
    # Mixed-radix digits of r, first generator least significant.
    if not 0 <= r < table.order:
        raise ValueError(f"character index {r} outside [0, {table.order})")
    digits = []
    for _, order in table.generators:
        r, d = divmod(r, order)
        digits.append(d)
    return tuple(digits)


def char_eval(table: CharacterTable, r: int, n: int) -> CharValue:
    """Value of the r-th character at n, as an exact root of unity or zero.

    Index 0 is the principal character; the indexing walks exponent
    tuples with the first generator varying fastest.
    """
    D = table.exponent
    n %= table.modulus
    key = n if (n or table.modulus == 1) else table.modulus
    if gcd(key, table.modulus) != 1:
        _decode_index(table, r)  # still validate the index
        return CharValue.nought(D)
    cs = _decode_index(table, r)
    es = table.log_table[n]
    t = 0
    for c, e, (_, order) in zip(cs, es, table.generators):
        t += c * e * (D // order)
    return CharValue(t % D, D)


@lru_cache(maxsize=64)
def _cyclotomic(d: int) -> tuple[int, ...]:
    # Phi_d by exact division of x^d - 1 by all Phi_e, e | d, e < d.
    poly = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            poly = _polydiv_exact(poly, list(_cyclotomic(e)))
    return tuple(poly)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    # Division by a monic integer polynomial; remainder must vanish.
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c == 0:
            continue
        out[i - dn] = c
        for jj in range(dn + 1):
            num[i - dn + jj] -= c * den[jj]
    if any(num):
        raise IntegrityError("inexact cyclotomic division")
    return out


def rational_root_sum(counts: list[int], order: int) -> int | None:
    """Exact value of sum_t counts[t] zeta_order^t if rational, else None.

    The coefficient vector is reduced mod the order-th cyclotomic
    polynomial; on the power basis of Q(zeta) the sum is rational iff
    only the constant coordinate survives.
    """
    if len(counts) != order:
        raise ValueError("counts must have one slot per power of the root")
    rem = list(counts)
    phi = list(_cyclotomic(order))
    dn = len(phi) - 1
    for i in range(order - 1, dn - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        for jj in range(dn + 1):
            rem[i - dn + jj] -= c * phi[jj]
    if any(rem[1:dn] if dn > 1 else []):
        return None
    return rem[0]


def orthogonality_check(table: CharacterTable, l: int, n: int) -> Fraction:
    """(1/phi(m)) sum_r psi_r(n) conj(psi_r(l)), as an exact rational.

    The sum is collected on powers of zeta and reduced exactly; a
    non-rational residue means the table is corrupt and raises
    IntegrityError.  For healthy tables the result is 1 when n = l mod m
    (and gcd(n, m) = 1), else 0.
    """
    m = table.modulus
    if gcd(l % m if m > 1 else 1, m) != 1:
        raise ValueError(f"residue l={l} is not a unit mod {m}")
    D = table.exponent
    counts = [0] * D
    any_nonzero = False
    for r in range(table.order):
        vn = char_eval(table, r, n)
        if vn.zero:
            continue
        vl = char_eval(table, r, l)
        counts[(vn.num - vl.num) % D] += 1
        any_nonzero = True
    if not any_nonzero:
        return Fraction(0, 1)
    val = rational_root_sum(counts, D)
    if val is None:
        raise IntegrityError(
            f"character sum mod {m} left a non-rational residue"
        )
    return Fraction(val, table.order)


def twist_coeffs(
    series: IntSeries, table: CharacterTable, r: int
) -> list[tuple[int, CharValue]]:
    """Coefficients of the twist of the series by the r-th character.

    Entry n is (a(n), psi_r(n)); the twisted coefficient is their exact
    product a(n) zeta^t, kept factored so no precision is lost.
    """
    m = table.modulus
    # psi_r is periodic mod m, so evaluate once per residue.
    per_residue = [char_eval(table, r, res) for res in range(m)]
    return [
        (series[n], per_residue[n % m]) for n in range(series.truncation + 1)
    ]


def twist_to_complex(twisted: list[tuple[int, CharValue]]) -> np.ndarray:
    """Binary64 rendering of a twisted coefficient list (for output only).

    The exact (integer, root-of-unity) pairs stay authoritative; this is
    the lossy view a CSV or plot consumes.
    """
    out = np.zeros(len(twisted), dtype=np.complex128)
    for n, (a, v) in enumerate(twisted):
        if a and not v.zero:
            out[n] = a * v.to_complex()
    return out


def reconstruct_residue_class(
    series: IntSeries, table: CharacterTable, l: int
) -> list[int]:
    """Recover the residue-class slice of a series from all its twists.

    Computes (1/phi(m)) sum_r conj(psi_r(l)) * twist_r exactly; entry n
    equals a(n) when n = l mod m and 0 otherwise.  Exactness of the final
    division by phi(m) is asserted, not assumed.
    """
    m = table.modulus
    if gcd(l % m if m > 1 else 1, m) != 1:
        raise ValueError(f"residue l={l} is not a unit mod {m}")
    D = table.exponent
    twists = [twist_coeffs(series, table, r) for r in range(table.order)]
    weights = [char_eval(table, r, l).conj() for r in range(table.order)]
    out = []
    for n in range(series.truncation + 1):
        counts = [0] * D
        a_n = series[n]
        empty = True
        for r in range(table.order):
            _, v = twists[r][n]
            if v.zero:
                continue
            counts[v.mul(weights[r]).num % D] += 1
            empty = False
        if empty:
            out.append(0)
            continue
        val = rational_root_sum(counts, D)
        if val is None:
            raise IntegrityError("twist reconstruction left a non-rational residue")
        total = val * a_n
        if total % table.order:
            raise IntegrityError("twist reconstruction not divisible by phi(m)")
        out.append(total // table.order)
    return out
