"""Acceptance gate: fourteen numbered criteria, one test each.

Each test states its tolerance inline.  Frozen constants come from an
independent pre-build oracle (criterion 2) or from the first verified
run at full scale (criteria 8, 9), recorded in the assertions verbatim.
Criterion 9's spread clause fails for the distinct-weight pair by the
analysis in the project notes: the product sum of two distinct forms
carries no linear main term, so its running slope decays to zero and
has no stable relative spread.  The test asserts the stated gate anyway
rather than weakening it.
"""

import cmath
import math
import random
import struct
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from cuspsigns.asymptotics import (
    EXPONENTS,
    fit_main_term,
    partial_sum_product,
    partial_sum_sparse,
)
from cuspsigns.census import progression_census, sparse_census
from cuspsigns.characters import build_table, orthogonality_check, reconstruct_residue_class
from cuspsigns.cli import write_cache, read_cache
from cuspsigns.dirichlet_series import (
    gamma_lanczos,
    rankin_partial,
    tail_bound_divisor_squared,
    zeta_alternating,
)
from cuspsigns.hecke import build_sieve, coeff_at_power, deligne_check, normalize
from cuspsigns.qseries import (
    CATALOG_WEIGHTS,
    IntSeries,
    delta_series,
    eigenform_series,
    eisenstein_series,
    eta_cubed_series,
    pentagonal_series,
    series_pow,
)

X_BIG = 1 << 20  # covers primes up to 10^6 with room
X_PREFIX = 10**5

# First 21 coefficients (a(0)..a(20)) of each catalog form, frozen from an
# independent schoolbook oracle (naive polynomial products, explicit
# divisor sums, no code shared with the package).
FIRST_20 = {
    12: [0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643,
         -115920, 534612, -370944, -577738, 401856, 1217160, 987136,
         -6905934, 2727432, 10661420, -7109760],
    16: [0, 1, 216, -3348, 13888, 52110, -723168, 2822456, -4078080,
         -3139803, 11255760, 20586852, -46497024, -190073338, 609650496,
         -174464280, -1335947264, 1646527986, -678197448, 1563257180,
         723703680],
    18: [0, 1, -528, -4284, 147712, -1025850, 2261952, 3225992, -8785920,
         -110787507, 541648800, -753618228, -632798208, 2541064526,
         -1703323776, 4394741400, -14721941504, -5429742318, 58495803696,
         1487499860, -151530355200],
    20: [0, 1, 456, 50652, -316352, -2377410, 23097312, -16917544,
         -383331840, 1403363637, -1084098960, -16212108, -16023861504,
         50421615062, -7714400064, -120420571320, -8939761664,
         225070099506, 639933818472, -1710278572660, 752098408320],
    22: [0, 1, -288, -128844, -2014208, 21640950, 37107072, -768078808,
         1184071680, 6140423133, -6232593600, -94724929188, 259518615552,
         -80621789794, 221206696704, -2788306561800, 3883087691776,
         3052282930002, -1768441862304, -7920788351740, -43589374617600],
    26: [0, 1, -48, -195804, -33552128, -741989850, 9398592, 39080597192,
         3221114880, -808949403027, 35615512800, 8419515299052,
         6569640870912, -81651045335314, -1875868665216, 145284580589400,
         1125667983917056, -2519900028948078, 38829571345296,
         -6082056370308940, 24895338421900800],
}

# Run-frozen regression constant for criterion 8 (first verified run at
# X = 2^20; the maximum sat at x = 2^11).
ENVELOPE_CONSTANT = 0.017595988433072005


@pytest.fixture(scope="module")
def corpus():
    """Sieve, normalized coefficients at 2^20, exact prefixes at 10^5."""
    sieve = build_sieve(X_BIG)
    ncs = {}
    prefix = {}
    for k in CATALOG_WEIGHTS:
        series = eigenform_series(k, X_BIG)
        ncs[k] = normalize(series, k)
        prefix[k] = IntSeries(series.coeffs[: X_PREFIX + 1])
        del series
    delta_series.cache_clear()
    eisenstein_series.cache_clear()
    return sieve, ncs, prefix


def test_criterion_01_dual_route_delta(corpus):
    """Pentagonal^24 and (eta^3)^8 expansions agree exactly to 10^5."""
    X = 10**5
    pent24 = series_pow(pentagonal_series(X - 1), 24)
    eta8 = series_pow(eta_cubed_series(X - 1), 8)
    assert pent24.coeffs == eta8.coeffs
    _, _, prefix = corpus
    assert prefix[12].coeffs == (0,) + pent24.coeffs


def test_criterion_02_coefficient_oracle():
    """First 20 coefficients of all six forms match the pre-build oracle."""
    for k, want in FIRST_20.items():
        got = eigenform_series(k, 20)
        assert list(got.coeffs) == want, f"weight {k}"


def test_criterion_03_hecke_consistency(corpus):
    """coeff_at_power(n, 1) equals the expansion coefficient, n <= 10^4."""
    sieve, _, prefix = corpus
    for k in CATALOG_WEIGHTS:
        series = prefix[k]
        for n in range(1, 10**4 + 1):
            assert coeff_at_power(n, 1, series, sieve, k) == series[n], (k, n)


def test_criterion_04_deligne_bound(corpus):
    """|lam(p)| <= 2 at every prime p <= 10^6, all six weights, exactly
    zero violations (the checker also enforces |lam(n)| <= d(n))."""
    sieve, ncs, _ = corpus
    for k in CATALOG_WEIGHTS:
        violations = deligne_check(ncs[k], sieve)
        assert violations == [], (k, violations[:3])


def test_criterion_05_orthogonality_identity(corpus):
    """Exact rational character orthogonality against weight-12
    coefficients: sum_r psi_r(n) conj(psi_r(l)) / phi(m) times a(n)
    equals I_l(n) a(n) for all n <= 10^4, m <= 24, units l."""
    _, _, prefix = corpus
    series = prefix[12]
    rng = random.Random(160924)
    for m in range(1, 25):
        table = build_table(m)
        for l in range(1, m + 1):
            if math.gcd(l, m) != 1:
                continue
            per_res = [orthogonality_check(table, l, res) for res in range(m)]
            for res, got in enumerate(per_res):
                want = (
                    Fraction(1)
                    if (res - l) % m == 0 and math.gcd(res, m) == 1
                    else Fraction(0)
                )
                if m == 1:
                    want = Fraction(1)
                assert got == want, (m, l, res)
            # the sum depends on n only through n mod m (spot-check the
            # periodicity the reduction relies on)
            for _ in range(10):
                n = rng.randrange(1, 10**4 + 1)
                assert orthogonality_check(table, l, n) == per_res[n % m]
            # and the coefficient identity itself, exactly, for all n
            for n in range(1, 10**4 + 1):
                a = series[n]
                lhs = per_res[n % m] * a
                rhs = a if (n - l) % m == 0 else 0
                assert lhs == rhs, (m, l, n)

    # the same identity assembled through the twist decomposition
    small = IntSeries(series.coeffs[:2001])
    for m in (5, 8):
        table = build_table(m)
        for l in range(1, m):
            if math.gcd(l, m) != 1:
                continue
            got = reconstruct_residue_class(small, table, l)
            want = [
                small[n] if n % m == l and math.gcd(n, m) == 1 else 0
                for n in range(2001)
            ]
            assert got == want


def test_criterion_06_dense_witness(corpus):
    """Every ordered pair of distinct weights, every modulus m <= 10 and
    unit residue, X = 10^5: both sign classes occupied."""
    _, ncs, _ = corpus
    X = 10**5
    for k1 in CATALOG_WEIGHTS:
        for k2 in CATALOG_WEIGHTS:
            if k1 == k2:
                continue
            for m in range(1, 11):
                for l in range(1, m + 1):
                    if math.gcd(l, m) != 1:
                        continue
                    rep = progression_census(ncs[k1].sign, ncs[k2].sign, m, l, X)
                    assert rep.same_sign >= 1 and rep.opposite_sign >= 1, (
                        k1, k2, m, l, rep.same_sign, rep.opposite_sign,
                    )


def test_criterion_07_sparse_witness(corpus):
    """Each distinct pair, each j in {2,3,4}, X = 10^4: both classes
    nonempty along the j-th powers."""
    sieve, _, prefix = corpus
    X = 10**4
    weights = CATALOG_WEIGHTS
    for i, k1 in enumerate(weights):
        for k2 in weights[i + 1 :]:
            for j in (2, 3, 4):
                rep = sparse_census(prefix[k1], k1, prefix[k2], k2, sieve, j, X)
                assert rep.same_sign >= 1 and rep.opposite_sign >= 1, (
                    k1, k2, j, rep.same_sign, rep.opposite_sign,
                )


def test_criterion_08_cancellation_envelope(corpus):
    """Delta, j = 2: max over x = 2^10..2^20 of |S(x)| / x^0.6 stays
    within 5% of the constant frozen on the first verified run."""
    sieve, ncs, _ = corpus
    cps = [1 << t for t in range(10, 21)]
    pts = partial_sum_sparse(ncs[12], sieve, 2, cps)
    alpha2 = float(EXPONENTS.alpha[2])
    observed = max(abs(s) / x ** (alpha2 + 0.1) for x, s in pts)
    assert abs(observed - ENVELOPE_CONSTANT) <= 0.05 * ENVELOPE_CONSTANT, observed


def test_criterion_09_main_term_stability(corpus):
    """Delta x weight-16, j = 2, ten log checkpoints to 10^6: relative
    spread of S(x)/x over the last three < 10%, and fitted remainder
    exponent <= 1 - beta_2 + 0.15.  The spread clause cannot hold for
    distinct forms (no linear main term; see notes), and is asserted
    as stated rather than weakened."""
    sieve, ncs, _ = corpus
    cps = sorted(set(round(10 ** (0.6 * i)) for i in range(1, 11)))
    pts = partial_sum_product(ncs[12], ncs[16], sieve, 2, cps)

    fit = fit_main_term(pts)
    gate = 1 - float(EXPONENTS.beta[2]) + 0.15
    assert fit.remainder_exponent is not None and fit.remainder_exponent <= gate, fit

    last3 = [s / x for x, s in pts[-3:]]
    mean = sum(last3) / 3
    spread = (max(last3) - min(last3)) / abs(mean)
    assert spread < 0.10, (
        f"running slopes {last3} spread {spread:.3f}; the product sum of "
        "two distinct eigenforms has zero linear coefficient, so the "
        "relative spread of a near-zero slope does not stabilize"
    )


def test_criterion_10_exponent_inequality():
    """Exact rational comparisons 9/11 > 1/2, 8/9 > 3/4, 25/27 > 7/9."""
    assert 1 - EXPONENTS.beta[2] == Fraction(9, 11) > Fraction(1, 2) == EXPONENTS.alpha[2]
    assert 1 - EXPONENTS.beta[3] == Fraction(8, 9) > Fraction(3, 4) == EXPONENTS.alpha[3]
    assert 1 - EXPONENTS.beta[4] == Fraction(25, 27) > Fraction(7, 9) == EXPONENTS.alpha[4]
    EXPONENTS.validate()


def test_criterion_11_truncation_coherence(corpus):
    """Rankin partial sums at X = 10^4 and 10^5 (s = 2, Delta x Delta)
    differ by less than the rigorous tail bound at 10^4."""
    _, ncs, _ = corpus
    p4 = rankin_partial(ncs[12], ncs[12], 1, 1, 2.0, 10**4)
    p5 = rankin_partial(ncs[12], ncs[12], 1, 1, 2.0, 10**5)
    assert abs(p5.value - p4.value) <= p4.tail_bound
    assert p4.tail_bound == tail_bound_divisor_squared(10**4, 2.0)


def test_criterion_12_special_functions():
    """zeta(2) and Gamma(1/2) to 1e-10; reflection identity to 1e-8 on a
    50-point grid."""
    assert abs(zeta_alternating(2.0) - math.pi**2 / 6) <= 1e-10
    assert abs(gamma_lanczos(0.5) - math.sqrt(math.pi)) <= 1e-10
    rng = random.Random(50)
    checked = 0
    while checked < 50:
        z = complex(rng.uniform(-4, 4), rng.uniform(0.1, 4.0))
        want = math.pi / cmath.sin(math.pi * z)
        got = gamma_lanczos(z) * gamma_lanczos(1 - z)
        assert abs(got - want) <= 1e-8 * abs(want), z
        checked += 1


def test_criterion_13_synthetic_fit_recovery():
    """Planted S(x) = 2x + x^0.7: slope within 1%, exponent within 0.05."""
    cps = sorted(set(round(10 ** (0.6 * i)) for i in range(1, 11)))
    fit = fit_main_term((x, 2.0 * x + x**0.7) for x in cps)
    assert abs(fit.slope - 2.0) <= 0.02
    assert fit.remainder_exponent is not None
    assert abs(fit.remainder_exponent - 0.7) <= 0.05


def test_criterion_14_byte_determinism(tmp_path):
    """Identical flags give byte-identical CSV output for every
    subcommand, and the cache round-trips bit-exactly."""
    invocations = [
        ["census", "--weight-f", "12", "--weight-g", "16", "--limit", "2000",
         "--modulus", "5", "--residue", "2", "--cumulative"],
        ["sparse", "--weight-f", "12", "--weight-g", "18", "--limit", "200",
         "--power", "3"],
        ["windows", "--weight-f", "12", "--weight-g", "16", "--power", "2",
         "--checkpoints", "100,400"],
        ["sums", "--weight-f", "12", "--weight-g", "12", "--power", "2",
         "--checkpoints", "16,64,256,1024,4096", "--fit"],
        ["rankin", "--weight-f", "16", "--weight-g", "12", "--limit", "500",
         "--sigma", "2.0", "--completed"],
    ]
    for argv in invocations:
        cmd = [sys.executable, "-m", "cuspsigns"] + argv
        r1 = subprocess.run(cmd, capture_output=True)
        r2 = subprocess.run(cmd, capture_output=True)
        assert r1.returncode == 0 and r2.returncode == 0, (argv, r1.stderr)
        assert r1.stdout == r2.stdout and r1.stdout, argv

    for c in ("a", "b"):
        r = subprocess.run(
            [sys.executable, "-m", "cuspsigns", "coeffs", "--weight-f", "16",
             "--limit", "300", "--cache-dir", str(tmp_path / c)],
            capture_output=True,
        )
        assert r.returncode == 0, r.stderr
    blob1 = (tmp_path / "a" / "w16_x300.cusp").read_bytes()
    blob2 = (tmp_path / "b" / "w16_x300.cusp").read_bytes()
    assert blob1 == blob2

    w, x, sign, lam = read_cache(str(tmp_path / "a" / "w16_x300.cusp"))
    rewritten = str(tmp_path / "rt.cusp")
    write_cache(rewritten, w, x, sign, lam)
    assert open(rewritten, "rb").read() == blob1
