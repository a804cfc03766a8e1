"""Multiplicative structure of eigenform coefficients.

Coefficients at prime powers follow the three-term Hecke recurrence; at
general n they multiply across coprime prime powers.  The normalized
(Deligne) coefficients lam(n) = a(n) / n^((k-1)/2) live in float64, but
signs are always taken from the exact integers, never from the floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .qseries import IntSeries


@dataclass(frozen=True)
class FactorSieve:
    """Smallest-prime-factor table for 2 <= n <= limit.

    spf[n] is the smallest prime dividing n (spf[0] = spf[1] = 0), so a
    full factorization is a walk dividing out spf until 1 remains.
    """

    limit: int
    spf: np.ndarray

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of n as (prime, exponent) pairs, primes ascending."""
        if n < 1 or n > self.limit:
            raise ValueError(f"n={n} outside sieve range [1, {self.limit}]")
        out = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def is_prime(self, n: int) -> bool:
        if n < 2 or n > self.limit:
            return False
        return int(self.spf[n]) == n


def build_sieve(X: int) -> FactorSieve:
    """Smallest-prime-factor sieve up to X (X >= 2)."""
    if X < 2:
        raise ValueError("sieve limit must be at least 2")
    spf = np.arange(X + 1, dtype=np.int32)
    spf[0] = spf[1] = 0
    for p in range(2, isqrt(X) + 1):
        if spf[p] == p:
            # Ascending p means minimum() can only be set by the smallest
            # prime factor; later primes never lower an already-hit slot.
            view = spf[p * p :: p]
            np.minimum(view, p, out=view)
    spf.setflags(write=False)
    return FactorSieve(X, spf)


def divisor_counts(X: int) -> np.ndarray:
    """d(n) for 0 <= n <= X (d[0] = 0), by harmonic sieving."""
    d = np.zeros(X + 1, dtype=np.int32)
    for i in range(1, X + 1):
        d[i::i] += 1
    return d


def coeff_prime_power(a_p: int, p: int, r: int, k: int) -> int:
    """Exact a(p^r) from a(p) via a(p^{j+1}) = a(p) a(p^j) - p^{k-1} a(p^{j-1})."""
    if r < 0:
        raise ValueError("prime-power exponent must be nonnegative")
    if r == 0:
        return 1
    pw = p ** (k - 1)
    prev, cur = 1, a_p
    for _ in range(r - 1):
        prev, cur = cur, a_p * cur - pw * prev
    return cur


def coeff_at_power(
    n: int, j: int, series: IntSeries, sieve: FactorSieve, k: int
) -> int:
    """Exact a(n^j) assembled from the factorization of n.

    Only the prime coefficients a(p) for p | n are read from the series,
    so the series needs to cover primes up to n but not n^j itself.
    """
    if j < 1 or j > 4:
        raise ValueError("power must be in 1..4")
    if n < 1:
        raise ValueError("n must be positive")
    if n > sieve.limit:
        raise ValueError(f"n={n} exceeds sieve limit {sieve.limit}")
    result = 1
    for p, e in sieve.factorize(n):
        if p > series.truncation:
            raise ValueError(f"series truncated below prime {p}")
        result *= coeff_prime_power(series[p], p, j * e, k)
    return result


@dataclass(frozen=True)
class NormalizedCoeffs:
    """Deligne-normalized coefficients of one eigenform up to its truncation.

    lam[n] = a(n) / n^((k-1)/2) as float64; sign[n] in {-1, 0, +1} is the
    sign of the exact integer a(n).  Index 0 is unused and set to 0.
    """

    weight: int
    lam: np.ndarray
    sign: np.ndarray

    @property
    def truncation(self) -> int:
        return len(self.lam) - 1


def normalize(series: IntSeries, k: int) -> NormalizedCoeffs:
    """Normalized coefficients of a series whose n-th coefficient is a(n)."""
    X = series.truncation
    lam = np.zeros(X + 1, dtype=np.float64)
    sign = np.zeros(X + 1, dtype=np.int8)
    half = (k - 1) / 2.0
    coeffs = series.coeffs
    for n in range(1, X + 1):
        a = coeffs[n]
        if a:
            sign[n] = 1 if a > 0 else -1
            lam[n] = a / n**half
    lam.setflags(write=False)
    sign.setflags(write=False)
    return NormalizedCoeffs(k, lam, sign)


@dataclass(frozen=True)
class BoundViolation:
    n: int
    value: float
    bound: float
    kind: str


def deligne_check(nc: NormalizedCoeffs, sieve: FactorSieve) -> list[BoundViolation]:
    """All n violating |lam(p)| <= 2 at primes or |lam(n)| <= d(n) anywhere.

    An empty list is the expected outcome for genuine eigenform data; a
    nonempty one points at a corrupted series or a wrong weight.
    """
    X = nc.truncation
    if sieve.limit < X:
        raise ValueError("sieve too short for the coefficient range")
    absl = np.abs(nc.lam)
    ns = np.arange(X + 1)
    prime_mask = (sieve.spf[: X + 1] == ns) & (ns >= 2)
    out = []
    for n in np.flatnonzero(prime_mask & (absl > 2.0)):
        out.append(BoundViolation(int(n), float(nc.lam[n]), 2.0, "prime"))
    d = divisor_counts(X)
    for n in np.flatnonzero(absl > d):
        if n == 0:
            continue
        out.append(BoundViolation(int(n), float(nc.lam[n]), float(d[n]), "divisor"))
    return out


def power_signs(
    series: IntSeries, k: int, sieve: FactorSieve, j: int, X: int
) -> np.ndarray:
    """sign(a(n^j)) for 0 <= n <= X as int8, from the exact recurrence.

    Signs come out of exact integer arithmetic at prime powers; the float
    normalization is never consulted.
    """
    if j < 1 or j > 4:
        raise ValueError("power must be in 1..4")
    if X > sieve.limit or X > series.truncation:
        raise ValueError("X exceeds sieve or series coverage")
    spf = sieve.spf[: X + 1].tolist()
    coeffs = series.coeffs
    pw_values: dict[int, list[int]] = {}  # p -> [a(p^0), a(p^1), ...]
    out = np.zeros(X + 1, dtype=np.int8)
    if X >= 1:
        out[1] = 1
    for n in range(2, X + 1):
        m = n
        s = 1
        while m > 1:
            p = spf[m]
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            r = j * e
            vals = pw_values.get(p)
            if vals is None:
                vals = [1, coeffs[p]]
                pw_values[p] = vals
            if len(vals) <= r:
                pk = p ** (k - 1)
                ap = vals[1]
                while len(vals) <= r:
                    vals.append(ap * vals[-1] - pk * vals[-2])
            v = vals[r]
            if v == 0:
                s = 0
                break
            if v < 0:
                s = -s
        out[n] = s
    return out


def power_lambdas(
    nc: NormalizedCoeffs, sieve: FactorSieve, j: int, X: int
) -> np.ndarray:
    """lam(n^j) for 0 <= n <= X as float64.

    Works prime by prime with the normalized recurrence
    lam(p^{r+1}) = lam(p) lam(p^r) - lam(p^{r-1}), which stays bounded by
    r + 2; dividing exact a(n^j) by n^{j(k-1)/2} would overflow float64
    long before the recurrence loses accuracy.
    """
    if j < 1 or j > 4:
        raise ValueError("power must be in 1..4")
    if X > sieve.limit or X > nc.truncation:
        raise ValueError("X exceeds sieve or coefficient coverage")
    spf = sieve.spf[: X + 1].tolist()
    lam = nc.lam
    pw_values: dict[int, list[float]] = {}
    out = np.zeros(X + 1, dtype=np.float64)
    if X >= 1:
        out[1] = 1.0
    for n in range(2, X + 1):
        m = n
        prod = 1.0
        while m > 1:
            p = spf[m]
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            r = j * e
            vals = pw_values.get(p)
            if vals is None:
                vals = [1.0, float(lam[p])]
                pw_values[p] = vals
            if len(vals) <= r:
                lp = vals[1]
                while len(vals) <= r:
                    vals.append(lp * vals[-1] - vals[-2])
            prod *= vals[r]
        out[n] = prod
    return out
