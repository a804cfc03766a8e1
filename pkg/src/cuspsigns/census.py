"""Sign statistics of coefficient pairs: progression-filtered censuses,
sparse-power censuses, and the short-window scan.

Products are classified strictly: a(n)b(n) > 0, < 0, or = 0, with zeros
in their own bucket.  All signs come in as exact-integer sign arrays;
no classification ever reads a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum, gcd

import numpy as np

from . import hecke
from .asymptotics import EXPONENTS
from .qseries import IntSeries


@dataclass(frozen=True)
class CensusReport:
    """Counts of same-sign / opposite-sign / zero products over a range.

    first_same / first_opposite are the smallest qualifying n in each
    class, or None if the class is empty.  cumulative, when requested,
    samples prefix counts (n, same, opposite, zero) at powers of two and
    the final X.
    """

    X: int
    filter: str
    same_sign: int
    opposite_sign: int
    zero: int
    first_same: int | None
    first_opposite: int | None
    cumulative: tuple[tuple[int, int, int, int], ...] | None = None

    @property
    def qualifying(self) -> int:
        return self.same_sign + self.opposite_sign + self.zero


@dataclass(frozen=True)
class WindowReport:
    """Sign census of one window (x, x+h] along a sparse power.

    both_signs records whether the window contains products of both
    strict signs; sum_product and sum_g are the window sums of
    lam_f(n^j) lam_g(n^j) and lam_g(n^j) for magnitude comparison with
    the linear and cancellation estimates.  h < 1 yields a degenerate
    report, never an error.
    """

    x: int
    h: int
    same_sign: int
    opposite_sign: int
    zero: int
    both_signs: bool
    sum_product: float
    sum_g: float
    degenerate: bool = False


def _checkpoint_grid(X: int) -> list[int]:
    cps = []
    c = 1
    while c <= X:
        cps.append(c)
        c *= 2
    if not cps or cps[-1] != X:
        cps.append(X)
    return cps


def _census(
    ns: np.ndarray, prod: np.ndarray, X: int, label: str, cumulative: bool
) -> CensusReport:
    pos = prod > 0
    neg = prod < 0
    zer = prod == 0
    first_same = int(ns[pos.argmax()]) if pos.any() else None
    first_opp = int(ns[neg.argmax()]) if neg.any() else None
    rows = None
    if cumulative:
        cpos = np.cumsum(pos)
        cneg = np.cumsum(neg)
        czer = np.cumsum(zer)
        rows = []
        for cp in _checkpoint_grid(X):
            k = int(np.searchsorted(ns, cp, side="right"))
            if k == 0:
                rows.append((cp, 0, 0, 0))
            else:
                rows.append((cp, int(cpos[k - 1]), int(cneg[k - 1]), int(czer[k - 1])))
        rows = tuple(rows)
    return CensusReport(
        X=X,
        filter=label,
        same_sign=int(pos.sum()),
        opposite_sign=int(neg.sum()),
        zero=int(zer.sum()),
        first_same=first_same,
        first_opposite=first_opp,
        cumulative=rows,
    )


def progression_census(
    f_sign, g_sign, m: int, l: int, X: int, cumulative: bool = False
) -> CensusReport:
    """Classify sign(a(n)) * sign(b(n)) over n = l, l+m, l+2m, ... <= X.

    The sign arrays are indexed by n (entry 0 unused) and must cover 1..X.
    gcd(l, m) = 1 is required; m = 1 gives the unrestricted census.
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    if X < 1:
        raise ValueError("X must be positive")
    f = np.asarray(f_sign, dtype=np.int8)
    g = np.asarray(g_sign, dtype=np.int8)
    if len(f) <= X or len(g) <= X:
        raise ValueError("sign arrays must cover 1..X")
    l0 = l % m
    if m > 1 and gcd(l0 if l0 else m, m) != 1:
        raise ValueError(f"residue {l} is not a unit mod {m}")
    start = l0 if l0 >= 1 else 1
    ns = np.arange(start, X + 1, m)
    prod = f[ns] * g[ns]
    return _census(ns, prod, X, f"n = {l0} (mod {m})", cumulative)


def sparse_census(
    f_series: IntSeries,
    k_f: int,
    g_series: IntSeries,
    k_g: int,
    sieve: hecke.FactorSieve,
    j: int,
    X: int,
    cumulative: bool = False,
    allow_unit_power: bool = False,
) -> CensusReport:
    """Classify sign(a(n^j)) * sign(b(n^j)) for n <= X, j in {2, 3, 4}.

    j = 1 duplicates the unfiltered progression census and is only
    accepted behind allow_unit_power (used to cross-check the two paths).
    """
    if j == 1 and not allow_unit_power:
        raise ValueError("power 1 only with allow_unit_power=True")
    if j not in (1, 2, 3, 4):
        raise ValueError(f"power {j} outside the supported range 2..4")
    sf = hecke.power_signs(f_series, k_f, sieve, j, X)
    sg = hecke.power_signs(g_series, k_g, sieve, j, X)
    ns = np.arange(1, X + 1)
    prod = sf[1:] * sg[1:]
    return _census(ns, prod, X, f"powers n^{j}", cumulative)


def window_scan(
    f_series: IntSeries,
    k_f: int,
    g_series: IntSeries,
    k_g: int,
    sieve: hecke.FactorSieve,
    j: int,
    x_grid,
    epsilon: float = 0.05,
) -> list[WindowReport]:
    """Census every window (x, x + x^(1 - beta_j + 2 epsilon)] in x_grid.

    The window width is the one the contradiction argument needs: wide
    enough that the linear main term C_j h dominates both error terms.
    epsilon defaults to 0.05, keeping 1 - beta_j + 2 epsilon < 1 and
    alpha_j + 3 epsilon < 1 - beta_j for every supported j.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if j not in (2, 3, 4):
        raise ValueError(f"power {j} outside the supported range 2..4")
    grid = [int(x) for x in x_grid]
    if not grid:
        raise ValueError("empty x grid")
    if min(grid) < 1:
        raise ValueError("window anchors must be positive")
    expo = float(1 - EXPONENTS.beta[j]) + 2.0 * epsilon
    widths = {x: int(x**expo) for x in grid}
    top = max(x + widths[x] for x in grid)
    if top > sieve.limit:
        raise ValueError(f"window reach {top} exceeds sieve limit {sieve.limit}")
    if top > f_series.truncation or top > g_series.truncation:
        raise ValueError(f"window reach {top} exceeds series truncation")

    sf = hecke.power_signs(f_series, k_f, sieve, j, top)
    sg = hecke.power_signs(g_series, k_g, sieve, j, top)
    lf = hecke.power_lambdas(hecke.normalize(f_series, k_f), sieve, j, top)
    lg = hecke.power_lambdas(hecke.normalize(g_series, k_g), sieve, j, top)

    out = []
    for x in grid:
        h = widths[x]
        if h < 1:
            out.append(
                WindowReport(x, h, 0, 0, 0, False, 0.0, 0.0, degenerate=True)
            )
            continue
        sl = slice(x + 1, x + h + 1)
        prod = sf[sl] * sg[sl]
        same = int((prod > 0).sum())
        opp = int((prod < 0).sum())
        zer = int((prod == 0).sum())
        out.append(
            WindowReport(
                x=x,
                h=h,
                same_sign=same,
                opposite_sign=opp,
                zero=zer,
                both_signs=same >= 1 and opp >= 1,
                sum_product=fsum((lf[sl] * lg[sl]).tolist()),
                sum_g=fsum(lg[sl].tolist()),
            )
        )
    return out
