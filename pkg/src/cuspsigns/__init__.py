"""Exact Fourier coefficients of the level-one eigenform catalog and
sign-change statistics of coefficient pairs.
"""

from .errors import IntegrityError
from .qseries import (
    CATALOG_WEIGHTS,
    EigenformId,
    IntSeries,
    delta_series,
    eigenform_series,
    eisenstein_series,
    series_mul,
    series_pow,
)
from .hecke import (
    FactorSieve,
    NormalizedCoeffs,
    build_sieve,
    coeff_at_power,
    coeff_prime_power,
    deligne_check,
    normalize,
)
from .characters import (
    CharacterTable,
    CharValue,
    build_table,
    char_eval,
    orthogonality_check,
    reconstruct_residue_class,
    twist_coeffs,
    twist_to_complex,
)
from .census import (
    CensusReport,
    WindowReport,
    progression_census,
    sparse_census,
    window_scan,
)
from .asymptotics import (
    EXPONENTS,
    ExponentTable,
    FitResult,
    fit_main_term,
    partial_sum_product,
    partial_sum_sparse,
)
from .dirichlet_series import (
    SeriesPoint,
    completed_rankin,
    completion_prefactor,
    gamma_lanczos,
    rankin_partial,
    zeta_restricted,
)

__version__ = "0.1.0"

__all__ = [
    "IntegrityError",
    "CATALOG_WEIGHTS",
    "EigenformId",
    "IntSeries",
    "delta_series",
    "eigenform_series",
    "eisenstein_series",
    "series_mul",
    "series_pow",
    "FactorSieve",
    "NormalizedCoeffs",
    "build_sieve",
    "coeff_at_power",
    "coeff_prime_power",
    "deligne_check",
    "normalize",
    "CharacterTable",
    "CharValue",
    "build_table",
    "char_eval",
    "orthogonality_check",
    "reconstruct_residue_class",
    "twist_coeffs",
    "twist_to_complex",
    "CensusReport",
    "WindowReport",
    "progression_census",
    "sparse_census",
    "window_scan",
    "EXPONENTS",
    "ExponentTable",
    "FitResult",
    "fit_main_term",
    "partial_sum_product",
    "partial_sum_sparse",
    "SeriesPoint",
    "completed_rankin",
    "completion_prefactor",
    "gamma_lanczos",
    "rankin_partial",
    "zeta_restricted",
    "__version__",
]
