"""Command-line surface: coefficient caches and CSV experiment output.

All CSV goes to standard output (or --out) with deterministic formatting:
integers as decimal, binary64 as 17-significant-digit %g, booleans as
0/1, absent values as empty fields.  Diagnostics go to standard error.
Exit codes: 0 complete result, 1 I/O failure, 2 usage or domain error,
3 integrity failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import struct
import sys
from contextlib import nullcontext

import numpy as np

from . import asymptotics, census, dirichlet_series, hecke, qseries
from .errors import IntegrityError

MAGIC = b"CUSP"
CACHE_VERSION = 1
# magic, version, weight, X, payload kind
_HEADER = struct.Struct("<4sHHQB")
PAYLOAD_SIGN_LAMBDA = 0
# One record per n: exact sign byte, then lambda(n) as little-endian
# binary64.  No padding; the dtype below is 9 bytes wide.
_RECORD = np.dtype([("sign", "i1"), ("lam", "<f8")])


def cache_path(cache_dir: str, weight: int, X: int) -> str:
    return os.path.join(cache_dir, f"w{weight}_x{X}.cusp")


def write_cache(path: str, weight: int, X: int, sign, lam) -> None:
    """Serialize signs and normalized values for n = 1..X.

    Byte-for-byte deterministic given (weight, X, version): fixed header,
    fixed endianness, no padding anywhere.
    """
    if weight not in qseries.CATALOG_WEIGHTS:
        raise ValueError(f"weight {weight} not in catalog")
    rec = np.zeros(X, dtype=_RECORD)
    rec["sign"] = sign[1 : X + 1]
    rec["lam"] = lam[1 : X + 1]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, CACHE_VERSION, weight, X, PAYLOAD_SIGN_LAMBDA))
        fh.write(rec.tobytes())


def read_cache(path: str) -> tuple[int, int, np.ndarray, np.ndarray]:
    """Load (weight, X, sign, lam) from a cache file; arrays indexed by n
    with entry 0 zeroed.  Any header or size mismatch is fatal.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise IntegrityError(f"{path}: truncated header")
    magic, version, weight, X, kind = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise IntegrityError(f"{path}: bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise IntegrityError(f"{path}: version {version}, expected {CACHE_VERSION}")
    if weight not in qseries.CATALOG_WEIGHTS:
        raise IntegrityError(f"{path}: weight {weight} not in catalog")
    if kind != PAYLOAD_SIGN_LAMBDA:
        raise IntegrityError(f"{path}: unknown payload kind {kind}")
    if len(blob) != _HEADER.size + X * _RECORD.itemsize:
        raise IntegrityError(
            f"{path}: payload is {len(blob) - _HEADER.size} bytes, "
            f"expected {X * _RECORD.itemsize}"
        )
    rec = np.frombuffer(blob, dtype=_RECORD, count=X, offset=_HEADER.size)
    sign = np.zeros(X + 1, dtype=np.int8)
    lam = np.zeros(X + 1, dtype=np.float64)
    sign[1:] = rec["sign"]
    lam[1:] = rec["lam"]
    sign.setflags(write=False)
    lam.setflags(write=False)
    return weight, X, sign, lam


def _normalized(weight: int, X: int, cache_dir: str | None) -> hecke.NormalizedCoeffs:
    # Cache files are an optimization only: used when an exact
    # (weight, X) file exists, recomputed from scratch otherwise.
    if cache_dir:
        p = cache_path(cache_dir, weight, X)
        if os.path.exists(p):
            w2, x2, sign, lam = read_cache(p)
            if (w2, x2) != (weight, X):
                raise IntegrityError(f"{p}: header says weight {w2}, X {x2}")
            return hecke.NormalizedCoeffs(weight, lam, sign)
    series = qseries.eigenform_series(weight, X)
    return hecke.normalize(series, weight)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _open_out(args):
    out = getattr(args, "out", None)
    if out:
        return open(out, "w", newline="")
    return nullcontext(sys.stdout)


def _parse_checkpoints(text: str) -> list[int]:
    try:
        cps = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"bad --checkpoints value {text!r}") from exc
    if not cps:
        raise ValueError("--checkpoints needs at least one value")
    return cps


def _census_rows(writer, rep: census.CensusReport) -> None:
    writer.writerow(
        ["n_checkpoint", "same", "opposite", "zero", "first_same", "first_opposite"]
    )
    if rep.cumulative is not None:
        for n, sm, op, zr in rep.cumulative:
            fs = rep.first_same if rep.first_same and rep.first_same <= n else None
            fo = (
                rep.first_opposite
                if rep.first_opposite and rep.first_opposite <= n
                else None
            )
            writer.writerow([n, sm, op, zr, _fmt(fs), _fmt(fo)])
    else:
        writer.writerow(
            [
                rep.X,
                rep.same_sign,
                rep.opposite_sign,
                rep.zero,
                _fmt(rep.first_same),
                _fmt(rep.first_opposite),
            ]
        )


def cmd_coeffs(args) -> int:
    X = args.limit
    if X < 1:
        raise ValueError("--limit must be >= 1")
    out = args.out
    if not out:
        d = args.cache_dir or "."
        os.makedirs(d, exist_ok=True)
        out = cache_path(d, args.weight_f, X)
    series = qseries.eigenform_series(args.weight_f, X)
    nc = hecke.normalize(series, args.weight_f)
    write_cache(out, args.weight_f, X, nc.sign, nc.lam)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_census(args) -> int:
    nc_f = _normalized(args.weight_f, args.limit, args.cache_dir)
    nc_g = (
        nc_f
        if args.weight_g == args.weight_f
        else _normalized(args.weight_g, args.limit, args.cache_dir)
    )
    rep = census.progression_census(
        nc_f.sign,
        nc_g.sign,
        args.modulus,
        args.residue,
        args.limit,
        cumulative=args.cumulative,
    )
    with _open_out(args) as fh:
        _census_rows(csv.writer(fh, lineterminator="\n"), rep)
    return 0


def cmd_sparse(args) -> int:
    X = args.limit
    f_series = qseries.eigenform_series(args.weight_f, X)
    g_series = (
        f_series
        if args.weight_g == args.weight_f
        else qseries.eigenform_series(args.weight_g, X)
    )
    sieve = hecke.build_sieve(max(X, 2))
    rep = census.sparse_census(
        f_series,
        args.weight_f,
        g_series,
        args.weight_g,
        sieve,
        args.power,
        X,
        cumulative=args.cumulative,
    )
    with _open_out(args) as fh:
        _census_rows(csv.writer(fh, lineterminator="\n"), rep)
    return 0


def cmd_windows(args) -> int:
    grid = _parse_checkpoints(args.checkpoints)
    j = args.power
    if j not in (2, 3, 4):
        raise ValueError(f"power {j} outside the supported range 2..4")
    if args.epsilon <= 0:
        raise ValueError("--epsilon must be positive")
    expo = float(1 - asymptotics.EXPONENTS.beta[j]) + 2.0 * args.epsilon
    top = max(x + int(x**expo) for x in grid)
    sieve = hecke.build_sieve(max(top, 2))
    f_series = qseries.eigenform_series(args.weight_f, top)
    g_series = (
        f_series
        if args.weight_g == args.weight_f
        else qseries.eigenform_series(args.weight_g, top)
    )
    reports = census.window_scan(
        f_series,
        args.weight_f,
        g_series,
        args.weight_g,
        sieve,
        j,
        grid,
        epsilon=args.epsilon,
    )
    with _open_out(args) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "x",
                "h",
                "same",
                "opposite",
                "zero",
                "both_signs",
                "degenerate",
                "sum_product",
                "sum_g",
            ]
        )
        for r in reports:
            writer.writerow(
                [
                    r.x,
                    r.h,
                    r.same_sign,
                    r.opposite_sign,
                    r.zero,
                    _fmt(r.both_signs),
                    _fmt(r.degenerate),
                    _fmt(r.sum_product),
                    _fmt(r.sum_g),
                ]
            )
    return 0


def cmd_sums(args) -> int:
    cps = _parse_checkpoints(args.checkpoints)
    X = max(cps)
    nc_f = _normalized(args.weight_f, X, args.cache_dir)
    nc_g = (
        nc_f
        if args.weight_g == args.weight_f
        else _normalized(args.weight_g, X, args.cache_dir)
    )
    sieve = hecke.build_sieve(max(X, 2))
    points = asymptotics.partial_sum_product(nc_f, nc_g, sieve, args.power, cps)
    fit = asymptotics.fit_main_term(points) if args.fit else None
    with _open_out(args) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["x", "S"]
        if fit is not None:
            header += ["slope", "slope_stderr", "remainder_exponent", "envelope_exponent"]
        writer.writerow(header)
        for x, s in points:
            row = [x, _fmt(s)]
            if fit is not None:
                row += [
                    _fmt(fit.slope),
                    _fmt(fit.slope_stderr),
                    _fmt(fit.remainder_exponent),
                    _fmt(fit.envelope_exponent),
                ]
            writer.writerow(row)
    return 0


def cmd_rankin(args) -> int:
    X = args.limit
    nc_f = _normalized(args.weight_f, X, args.cache_dir)
    nc_g = (
        nc_f
        if args.weight_g == args.weight_f
        else _normalized(args.weight_g, X, args.cache_dir)
    )
    s = complex(args.sigma, args.t)
    point = dirichlet_series.rankin_partial(
        nc_f,
        nc_g,
        args.modulus,
        args.residue,
        s,
        X,
        tail_bounded=not args.exploratory,
    )
    completed = None
    if args.completed:
        completed = dirichlet_series.completed_rankin(
            nc_f,
            nc_g,
            args.modulus,
            args.residue,
            args.weight_f,
            args.weight_g,
            s,
            X,
            tail_bounded=not args.exploratory,
        )
    with _open_out(args) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["sigma", "t", "X", "terms_used", "value_re", "value_im", "tail_bound"]
        row = [
            _fmt(args.sigma),
            _fmt(args.t),
            X,
            point.terms_used,
            _fmt(point.value.real),
            _fmt(point.value.imag),
            _fmt(point.tail_bound),
        ]
        if completed is not None:
            header += ["completed_re", "completed_im"]
            row += [_fmt(completed.real), _fmt(completed.imag)]
        writer.writerow(header)
        writer.writerow(row)
    return 0


def _weight_args(p: argparse.ArgumentParser, both: bool = True) -> None:
    p.add_argument(
        "--weight-f",
        type=int,
        required=True,
        metavar="K1",
        help=f"catalog weight of f, one of {qseries.CATALOG_WEIGHTS}",
    )
    if both:
        p.add_argument(
            "--weight-g",
            type=int,
            required=True,
            metavar="K2",
            help="catalog weight of g",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuspsigns",
        description="Sign statistics of eigenform Fourier coefficients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    cache_default = os.environ.get("CUSP_CACHE_DIR")

    p = sub.add_parser(
        "coeffs", help="write a sign+lambda coefficient cache for one eigenform"
    )
    _weight_args(p, both=False)
    p.add_argument("--limit", type=int, required=True, metavar="X")
    p.add_argument("--cache-dir", default=cache_default)
    p.add_argument("--out", help="explicit cache path (default: cache dir)")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser(
        "census",
        help="sign census of a(n)b(n) over an arithmetic progression; CSV: "
        "n_checkpoint,same,opposite,zero,first_same,first_opposite",
    )
    _weight_args(p)
    p.add_argument("--modulus", type=int, default=1)
    p.add_argument("--residue", type=int, default=1)
    p.add_argument("--limit", type=int, required=True, metavar="X")
    p.add_argument("--cumulative", action="store_true")
    p.add_argument("--cache-dir", default=cache_default)
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser(
        "sparse",
        help="sign census of a(n^j)b(n^j), j in 2..4; CSV schema as census",
    )
    _weight_args(p)
    p.add_argument("--power", type=int, required=True, metavar="J")
    p.add_argument("--limit", type=int, required=True, metavar="X")
    p.add_argument("--cumulative", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sparse)

    p = sub.add_parser(
        "windows",
        help="short-window sign scan at anchors from --checkpoints; CSV: "
        "x,h,same,opposite,zero,both_signs,degenerate,sum_product,sum_g",
    )
    _weight_args(p)
    p.add_argument("--power", type=int, required=True, metavar="J")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument(
        "--checkpoints", required=True, help="comma-separated window anchors x"
    )
    p.add_argument("--out")
    p.set_defaults(func=cmd_windows)

    p = sub.add_parser(
        "sums",
        help="partial sums of lam_f(n^j) lam_g(n^j); CSV: x,S plus fit "
        "columns with --fit",
    )
    _weight_args(p)
    p.add_argument("--power", type=int, required=True, metavar="J")
    p.add_argument("--checkpoints", required=True, help="comma-separated x values")
    p.add_argument("--fit", action="store_true")
    p.add_argument("--cache-dir", default=cache_default)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sums)

    p = sub.add_parser(
        "rankin",
        help="truncated Rankin-Selberg value at s = sigma + i t (normalized "
        "variable); CSV: sigma,t,X,terms_used,value_re,value_im,tail_bound",
    )
    _weight_args(p)
    p.add_argument("--modulus", type=int, default=1)
    p.add_argument("--residue", type=int, default=1)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--limit", type=int, required=True, metavar="X")
    p.add_argument(
        "--exploratory",
        action="store_true",
        help="allow sigma <= 1 with an infinite tail bound",
    )
    p.add_argument(
        "--completed",
        action="store_true",
        help="append the completed value (archimedean and zeta factors)",
    )
    p.add_argument("--cache-dir", default=cache_default)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rankin)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
