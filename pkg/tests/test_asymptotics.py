import math
import random
from fractions import Fraction
from types import MappingProxyType

import pytest

from cuspsigns.asymptotics import (
    EXPONENTS,
    ExponentTable,
    fit_main_term,
    partial_sum_product,
    partial_sum_sparse,
)
from cuspsigns.errors import IntegrityError
from cuspsigns.hecke import build_sieve, normalize, power_lambdas
from cuspsigns.qseries import eigenform_series


def test_exponent_table_values():
    assert EXPONENTS.alpha == {2: Fraction(1, 2), 3: Fraction(3, 4), 4: Fraction(7, 9)}
    assert EXPONENTS.beta == {2: Fraction(2, 11), 3: Fraction(1, 9), 4: Fraction(2, 27)}
    EXPONENTS.validate()  # exact: 1 - beta_j > alpha_j


def test_exponent_table_rejects_broken_inequality():
    bad = ExponentTable(
        alpha=MappingProxyType({2: Fraction(9, 10)}),
        beta=MappingProxyType({2: Fraction(2, 11)}),
    )
    with pytest.raises(IntegrityError):
        bad.validate()


def test_partial_sums_match_direct_fsum():
    X = 600
    sv = build_sieve(X)
    nf = normalize(eigenform_series(12, X), 12)
    ng = normalize(eigenform_series(18, X), 18)
    cps = [10, 100, 600]
    lam_f = power_lambdas(nf, sv, 2, X)
    lam_g = power_lambdas(ng, sv, 2, X)
    for x, s in partial_sum_sparse(nf, sv, 2, cps):
        assert s == math.fsum(lam_f[1 : x + 1].tolist())
    for x, s in partial_sum_product(nf, ng, sv, 2, cps):
        assert s == math.fsum((lam_f[1 : x + 1] * lam_g[1 : x + 1]).tolist())


def test_partial_sum_checkpoint_validation():
    X = 100
    sv = build_sieve(X)
    nc = normalize(eigenform_series(12, X), 12)
    with pytest.raises(ValueError):
        partial_sum_sparse(nc, sv, 2, [])
    with pytest.raises(ValueError):
        partial_sum_sparse(nc, sv, 2, [0, 10])
    with pytest.raises(ValueError):
        partial_sum_sparse(nc, sv, 2, [101])
    # unordered input comes back sorted
    got = partial_sum_sparse(nc, sv, 2, [100, 10])
    assert [x for x, _ in got] == [10, 100]


def test_fit_recovers_planted_remainder():
    pts = [(x, 2.0 * x + x**0.7) for x in (2**t for t in range(4, 16))]
    fit = fit_main_term(pts)
    assert fit.slope == pytest.approx(2.0, abs=1e-9)
    assert fit.remainder_exponent == pytest.approx(0.7, abs=0.05)
    assert fit.envelope_exponent == pytest.approx(0.7, abs=0.05)
    assert fit.sample_points == tuple(2**t for t in range(4, 16))


def test_fit_exact_line_floors_residuals():
    fit = fit_main_term((x, 3.0 * x) for x in (2**t for t in range(4, 16)))
    assert fit.slope == pytest.approx(3.0, rel=1e-14)
    assert fit.remainder_exponent is None
    assert fit.envelope_exponent is None
    assert any("floor" in n for n in fit.notes)


def test_fit_boundary_exponent_is_flagged():
    fit = fit_main_term((x, 5.0 * x + x**0.02) for x in (2**t for t in range(4, 18)))
    assert fit.slope == pytest.approx(5.0, rel=1e-9)
    assert any("boundary" in n for n in fit.notes)


def test_fit_falls_back_without_admissible_split():
    # constant data has no decomposition with a dominant linear term
    xs = [2**t for t in range(4, 18)]
    fit = fit_main_term((x, 1000.0) for x in xs)
    assert any("plain through-origin" in n for n in fit.notes)
    want = 1000.0 * sum(map(float, xs)) / sum(float(x) ** 2 for x in xs)
    assert fit.slope == pytest.approx(want, rel=1e-12)


def test_fit_randomized_recovery():
    # planted slope within 1% and exponent within 0.05, 100 seeded trials
    rng = random.Random(1859)
    xs = [2**t for t in range(4, 21)]
    for trial in range(100):
        c = rng.uniform(0.5, 5.0)
        e = rng.uniform(0.3, 0.9)
        a = rng.uniform(0.5, 2.0)
        fit = fit_main_term((x, c * x + a * x**e) for x in xs)
        assert abs(fit.slope - c) <= 0.01 * c, (trial, c, e, a, fit.slope)
        assert fit.remainder_exponent is not None
        assert abs(fit.remainder_exponent - e) <= 0.05, (trial, c, e, a, fit)


def test_fit_input_validation():
    with pytest.raises(ValueError):
        fit_main_term([(1, 1.0), (10, 2.0), (100, 3.0), (1000, 4.0)])
    with pytest.raises(ValueError):
        fit_main_term([(x, 1.0) for x in (1, 2, 4, 8, 16)])  # span too short
    with pytest.raises(ValueError):
        fit_main_term([(x, 1.0) for x in (0, 10, 100, 1000, 10000)])
    with pytest.raises(ValueError):
        fit_main_term([(10, 1.0), (10, 1.0), (100, 2.0), (1000, 3.0), (10000, 4.0)])
