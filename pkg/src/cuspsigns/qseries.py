"""Exact integer q-expansions of the level-one eigenform catalog.

Everything here is exact: coefficients are Python ints, products are
computed without rounding, and the weight-12 generator is built twice
from unrelated identities and compared entry by entry before it is
released to callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import gmpy2

from .errors import IntegrityError

# Weights of the one-dimensional spaces of level-one cusp forms, and the
# monomial in the two Eisenstein generators that spans each of them
# (exponents of E4 and E6 multiplying the weight-12 form).
CATALOG_WEIGHTS = (12, 16, 18, 20, 22, 26)
_CATALOG_MONOMIAL = {
    12: (0, 0),
    16: (1, 0),
    18: (0, 1),
    20: (2, 0),
    22: (1, 1),
    26: (2, 1),
}


@dataclass(frozen=True)
class IntSeries:
    """Power series truncated at q^X with exact integer coefficients.

    coeffs[n] is the coefficient of q^n, so the truncation order is
    len(coeffs) - 1.  Instances are immutable; operations return new
    series of the same truncation.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a series needs at least a constant coefficient")

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)


def identity_series(X: int) -> IntSeries:
    """The multiplicative identity 1, truncated at q^X."""
    if X < 0:
        raise ValueError("truncation order must be nonnegative")
    return IntSeries((1,) + (0,) * X)


def _pack_signed(coeffs, width: int) -> "gmpy2.mpz":
    # Evaluate the nonnegative and negative parts at 2**width separately;
    # gmpy2.pack only accepts nonnegative digits.
    pos = [c if c > 0 else 0 for c in coeffs]
    neg = [-c if c < 0 else 0 for c in coeffs]
    return gmpy2.pack(pos, width) - gmpy2.pack(neg, width)


def _mul_coeffs(a: tuple[int, ...], b: tuple[int, ...]) -> list[int]:
    """Exact truncated product of two coefficient lists of equal length.

    Kronecker substitution: both series are evaluated at 2**B for a slot
    width B wide enough that no convolution coefficient can reach half a
    slot, multiplied as single integers, and the digits are read back.
    Signed coefficients are handled by biasing each digit by 2**(B-1)
    before unpacking, which turns the signed digit stream into the base
    2**B representation of a related nonnegative integer.
    """
    n = len(a)
    ma = max((abs(c) for c in a), default=0)
    mb = max((abs(c) for c in b), default=0)
    if ma == 0 or mb == 0:
        return [0] * n
    # |conv coeff| <= n * ma * mb; two guard bits keep the biased digit
    # strictly inside [0, 2**B).
    width = ma.bit_length() + mb.bit_length() + n.bit_length() + 2
    prod = _pack_signed(a, width) * _pack_signed(b, width)
    bias = gmpy2.mpz(1) << (width - 1)
    nprod = 2 * n - 1
    lifted = prod + gmpy2.pack([bias] * nprod, width)
    # Only the first n digits are wanted; drop the rest before unpacking.
    lifted &= (gmpy2.mpz(1) << (width * n)) - 1
    digits = gmpy2.unpack(lifted, width)[:n]
    return [int(d - bias) for d in digits]


def series_mul(a: IntSeries, b: IntSeries) -> IntSeries:
    """Exact product of two series with matching truncation."""
    if a.truncation != b.truncation:
        raise ValueError(
            f"truncation mismatch: {a.truncation} vs {b.truncation}"
        )
    return IntSeries(tuple(_mul_coeffs(a.coeffs, b.coeffs)))


def series_pow(a: IntSeries, e: int, allow_zero_exponent: bool = False) -> IntSeries:
    """a**e by binary exponentiation; e must be a positive int.

    e == 0 returns the identity only when allow_zero_exponent is set,
    since a zero exponent in this codebase almost always means a caller
    computed a malformed product decomposition.
    """
    if e < 0:
        raise ValueError("negative exponents are not defined for truncated series")
    if e == 0:
        if not allow_zero_exponent:
            raise ValueError("zero exponent rejected; pass allow_zero_exponent=True")
        return identity_series(a.truncation)
    result = None
    base = a
    while True:
        if e & 1:
            result = base if result is None else series_mul(result, base)
        e >>= 1
        if not e:
            return result
        base = series_mul(base, base)


def pentagonal_series(X: int) -> IntSeries:
    """Expansion of prod_{n>=1} (1 - q^n) via the pentagonal number theorem.

    The only nonzero coefficients sit at the generalized pentagonal
    numbers k(3k-1)/2 for k = 1, -1, 2, -2, ... and equal (-1)^k.
    """
    if X < 0:
        raise ValueError("truncation order must be nonnegative")
    coeffs = [0] * (X + 1)
    coeffs[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > X:
            break
        s = -1 if k % 2 else 1
        coeffs[g1] = s
        g2 = k * (3 * k + 1) // 2
        if g2 <= X:
            coeffs[g2] = s
        k += 1
    return IntSeries(tuple(coeffs))


def eta_cubed_series(X: int) -> IntSeries:
    """Expansion of prod (1 - q^n)^3 = sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}."""
    if X < 0:
        raise ValueError("truncation order must be nonnegative")
    coeffs = [0] * (X + 1)
    k = 0
    while True:
        t = k * (k + 1) // 2
        if t > X:
            break
        coeffs[t] = (2 * k + 1) if k % 2 == 0 else -(2 * k + 1)
        k += 1
    return IntSeries(tuple(coeffs))


@lru_cache(maxsize=2)
def delta_series(X: int) -> IntSeries:
    """The weight-12 form q * prod (1 - q^n)^24, exact to q^X.

    Built twice: as the 24th power of the pentagonal expansion and as the
    8th power of the cubed product.  Any coefficient disagreement is a
    fatal IntegrityError, never a warning.
    """
    if X < 1:
        raise ValueError("the weight-12 form starts at q^1; need X >= 1")
    via_pentagonal = series_pow(pentagonal_series(X - 1), 24)
    via_cube = series_pow(eta_cubed_series(X - 1), 8)
    if via_pentagonal.coeffs != via_cube.coeffs:
        bad = next(
            n
            for n in range(X)
            if via_pentagonal.coeffs[n] != via_cube.coeffs[n]
        )
        raise IntegrityError(
            f"weight-12 expansions disagree first at q^{bad + 1}: "
            f"{via_pentagonal.coeffs[bad]} vs {via_cube.coeffs[bad]}"
        )
    return IntSeries((0,) + via_pentagonal.coeffs)


def _divisor_power_sums(power: int, X: int) -> list[int]:
    # sigma_power(n) for 0 < n <= X by direct sieving over divisors.
    # Values of sigma_5 near 1e6 overflow int64, so this stays in Python ints.
    sums = [0] * (X + 1)
    for d in range(1, X + 1):
        dp = d**power
        for n in range(d, X + 1, d):
            sums[n] += dp
    return sums


@lru_cache(maxsize=4)
def eisenstein_series(k: int, X: int) -> IntSeries:
    """Normalized Eisenstein series of weight 4 or 6, exact to q^X."""
    if k not in (4, 6):
        raise ValueError(f"only weights 4 and 6 are generators here, got {k}")
    if X < 0:
        raise ValueError("truncation order must be nonnegative")
    scale = 240 if k == 4 else -504
    sigma = _divisor_power_sums(k - 1, X)
    coeffs = [scale * s for s in sigma]
    coeffs[0] = 1
    return IntSeries(tuple(coeffs))


@dataclass(frozen=True)
class EigenformId:
    """Identifier of a catalog eigenform; currently just its weight."""

    weight: int

    def __post_init__(self):
        if self.weight not in CATALOG_WEIGHTS:
            raise ValueError(
                f"weight {self.weight} is not in the catalog {CATALOG_WEIGHTS}"
            )


def eigenform_series(form: EigenformId | int, X: int) -> IntSeries:
    """Exact expansion of the unique normalized eigenform of the given weight.

    Each catalog form is the weight-12 form times a monomial in the two
    Eisenstein generators; with one-dimensional spaces the product is
    automatically the normalized eigenform.
    """
    if isinstance(form, int):
        form = EigenformId(form)
    i4, i6 = _CATALOG_MONOMIAL[form.weight]
    series = delta_series(X)
    for _ in range(i4):
        series = series_mul(series, eisenstein_series(4, X))
    for _ in range(i6):
        series = series_mul(series, eisenstein_series(6, X))
    return series
