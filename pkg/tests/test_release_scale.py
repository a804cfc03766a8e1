import pytest

from cuspsigns.hecke import build_sieve, deligne_check, normalize
from cuspsigns.qseries import delta_series, eta_cubed_series, pentagonal_series, series_pow

# Opt-in large runs: pytest -m release (deselected by default addopts).


@pytest.mark.release
def test_dual_route_delta_at_one_million():
    X = 10**6
    pent24 = series_pow(pentagonal_series(X - 1), 24)
    eta8 = series_pow(eta_cubed_series(X - 1), 8)
    assert pent24.coeffs == eta8.coeffs
    d = delta_series(X)
    assert d.coeffs == (0,) + pent24.coeffs[: X]
    delta_series.cache_clear()


@pytest.mark.release
def test_deligne_bound_delta_at_one_million():
    X = 10**6
    nc = normalize(delta_series(X), 12)
    delta_series.cache_clear()
    assert deligne_check(nc, build_sieve(X)) == []
