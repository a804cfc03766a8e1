"""Partial sums of normalized coefficients along sparse powers, and
main-term / remainder-exponent estimation.

The exponent pairs (alpha_j, beta_j) parameterize the cancellation and
linear-growth rates for sums over n of lam(n^j) and lam_f(n^j)lam_g(n^j);
the strict inequality 1 - beta_j > alpha_j for each j is what makes the
short-window comparison argument close, so it is asserted at import.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType

import numpy as np

from . import hecke
from .errors import IntegrityError


@dataclass(frozen=True)
class ExponentTable:
    """Cancellation exponents alpha_j and main-term error exponents beta_j."""

    alpha: "MappingProxyType[int, Fraction]"
    beta: "MappingProxyType[int, Fraction]"

    def validate(self) -> None:
        """Exact rational check of 1 - beta_j > alpha_j for every j."""
        for j in self.alpha:
            if not 1 - self.beta[j] > self.alpha[j]:
                raise IntegrityError(
                    f"exponent inequality fails at j={j}: "
                    f"1 - {self.beta[j]} <= {self.alpha[j]}"
                )


EXPONENTS = ExponentTable(
    alpha=MappingProxyType(
        {2: Fraction(1, 2), 3: Fraction(3, 4), 4: Fraction(7, 9)}
    ),
    beta=MappingProxyType(
        {2: Fraction(2, 11), 3: Fraction(1, 9), 4: Fraction(2, 27)}
    ),
)
EXPONENTS.validate()


@dataclass(frozen=True)
class FitResult:
    """Main-term fit of partial-sum data S(x) ~ slope * x + O(x^theta).

    remainder_exponent is the log-log regression slope of |S - slope*x|;
    envelope_exponent regresses only the running maxima of the residual,
    since O-bounds constrain envelopes rather than pointwise values.
    Either exponent is None when the residual sits at the floating-point
    floor.  notes carries warnings (near-zero slope, boundary fits).
    """

    slope: float
    slope_stderr: float
    remainder_exponent: float | None
    envelope_exponent: float | None
    sample_points: tuple[int, ...]
    notes: tuple[str, ...] = ()


def _validated_checkpoints(checkpoints, limit: int) -> list[int]:
    cps = sorted(set(int(x) for x in checkpoints))
    if not cps:
        raise ValueError("need at least one checkpoint")
    if cps[0] < 1:
        raise ValueError("checkpoints must be >= 1")
    if cps[-1] > limit:
        raise ValueError(f"checkpoint {cps[-1]} exceeds coverage {limit}")
    return cps


def partial_sum_sparse(
    nc: hecke.NormalizedCoeffs, sieve: hecke.FactorSieve, j: int, checkpoints
) -> list[tuple[int, float]]:
    """S(x) = sum_{n<=x} lam(n^j) at each checkpoint, ascending.

    Each checkpoint sum runs through math.fsum, so the binary64 result is
    the correctly rounded value of the exact sum of the term doubles.
    """
    cps = _validated_checkpoints(
        checkpoints, min(sieve.limit, nc.truncation)
    )
    values = hecke.power_lambdas(nc, sieve, j, cps[-1]).tolist()
    return [(x, math.fsum(values[1 : x + 1])) for x in cps]


def partial_sum_product(
    nc_f: hecke.NormalizedCoeffs,
    nc_g: hecke.NormalizedCoeffs,
    sieve: hecke.FactorSieve,
    j: int,
    checkpoints,
) -> list[tuple[int, float]]:
    """S(x) = sum_{n<=x} lam_f(n^j) lam_g(n^j) at each checkpoint."""
    cps = _validated_checkpoints(
        checkpoints, min(sieve.limit, nc_f.truncation, nc_g.truncation)
    )
    lf = hecke.power_lambdas(nc_f, sieve, j, cps[-1])
    lg = hecke.power_lambdas(nc_g, sieve, j, cps[-1])
    values = (lf * lg).tolist()
    return [(x, math.fsum(values[1 : x + 1])) for x in cps]


# Candidate remainder exponents for the two-term model scan; 0 and 1 are
# excluded so the x^e column never turns collinear with the x column.
_EXPONENT_GRID = [round(0.02 + 0.005 * i, 3) for i in range(193)]

_RESIDUAL_FLOOR = 1e-12


def fit_main_term(points) -> FitResult:
    """Estimate slope and remainder exponent from (x, S(x)) samples.

    A plain through-origin fit leaks the remainder term into the slope
    badly enough to swamp the residuals at the largest checkpoints, so
    the slope comes from the best two-term model S ~ C*x + A*x^e over a
    grid of exponents e (linear least squares in (C, A) for each e,
    lowest squared error wins).  The remainder exponent is then the
    log-log regression slope of |S - C*x| with near-zero residuals
    (below 1e-12 of |S|) excluded.
    """
    pts = sorted((int(x), float(s)) for x, s in points)
    if len(pts) < 5:
        raise ValueError("need at least 5 points to fit")
    xs = np.array([p[0] for p in pts], dtype=np.float64)
    ss = np.array([p[1] for p in pts], dtype=np.float64)
    if len(set(p[0] for p in pts)) != len(pts):
        raise ValueError("sample points must be distinct")
    if xs[0] <= 0:
        raise ValueError("sample points must be positive")
    if xs[-1] / xs[0] < 100:
        raise ValueError("sample points must span at least two decades")

    notes: list[str] = []
    plain_slope = float(xs @ ss / (xs @ xs))
    best = None
    for e in _EXPONENT_GRID:
        basis = np.column_stack([xs, xs**e])
        coef, _, _, _ = np.linalg.lstsq(basis, ss, rcond=None)
        # Admissible models keep the remainder subdominant at the top
        # checkpoint; without that the decomposition is not of the
        # main-term-plus-error shape being estimated.
        if abs(coef[1]) * xs[-1] ** e > abs(coef[0]) * xs[-1]:
            continue
        sse = float(((ss - basis @ coef) ** 2).sum())
        if best is None or sse < best[0]:
            best = (sse, e, coef, basis)
    if best is not None:
        sse, e_model, coef, basis = best
        slope = float(coef[0])
        if e_model in (_EXPONENT_GRID[0], _EXPONENT_GRID[-1]):
            notes.append(
                f"remainder model exponent {e_model} sits at the scan boundary"
            )
        dof = len(xs) - 2
        sigma2 = sse / dof if dof > 0 else 0.0
        cov = sigma2 * np.linalg.pinv(basis.T @ basis)
        slope_stderr = float(math.sqrt(max(cov[0, 0], 0.0)))
    else:
        # No two-term split with a subdominant remainder exists over this
        # span; report the plain through-origin slope instead.
        notes.append("no admissible two-term model; plain through-origin fit")
        slope = plain_slope
        resid0 = ss - slope * xs
        dof = len(xs) - 1
        sigma2 = float((resid0**2).sum()) / dof if dof > 0 else 0.0
        slope_stderr = float(math.sqrt(sigma2 / float(xs @ xs)))

    resid = ss - slope * xs
    keep = np.abs(resid) > _RESIDUAL_FLOOR * np.abs(ss)
    remainder_exponent = None
    envelope_exponent = None
    if keep.sum() >= 2:
        rx = np.log(xs[keep])
        ry = np.log(np.abs(resid[keep]))
        remainder_exponent = float(np.polyfit(rx, ry, 1)[0])
        run_max = np.maximum.accumulate(np.abs(resid[keep]))
        env = np.abs(resid[keep]) >= run_max
        if env.sum() >= 2:
            envelope_exponent = float(np.polyfit(rx[env], ry[env], 1)[0])
    else:
        notes.append("residuals at the floating-point floor; exponents undefined")

    if abs(slope) * xs[-1] < 0.01 * float(np.abs(ss).max()):
        notes.append(
            "near-zero slope: the linear term is not dominant over these checkpoints"
        )

    return FitResult(
        slope=slope,
        slope_stderr=slope_stderr,
        remainder_exponent=remainder_exponent,
        envelope_exponent=envelope_exponent,
        sample_points=tuple(int(x) for x in xs),
        notes=tuple(notes),
    )
