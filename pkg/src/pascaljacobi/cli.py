"""Command-line front end: exact verification suites, spectra, identity
checks, and the eigenvector-error benchmark with machine-readable output."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from mpmath import mp, mpf
import mpmath

from . import diffop, exact, oracle, spectral
from .report import IdentityReport


@dataclass
class BenchmarkRow:
    t_eigenvalue: float
    j_eigenvalue: float
    error_via_j: float
    error_via_t: float


# ---------------------------------------------------------------------------
# verify

def run_verify(n_max: int, jn_builder=exact.jacobi_JN) -> IdentityReport:
    """Exact identity suites for dimensions 1..n_max plus the operator
    relations.  ``jn_builder`` is injectable so corruption can be tested."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    report = IdentityReport()
    for n in range(1, n_max + 1):
        t = exact.pascal_symmetric(n)
        report.add(
            exact._zero_check(
                "pascal commutes with its Jacobi matrix", n,
                exact.commutator(t, jn_builder(n)),
            )
        )
        report.extend(_structural_suite(n))
    report.extend(diffop.bispectral_check(max(3, min(n_max, 16))))
    return report


def _structural_suite(n: int) -> IdentityReport:
    report = IdentityReport()
    psi = exact.pascal_lower(n)
    lam = exact.sign_diagonal(n)
    report.add(
        exact._zero_check(
            "pascal = lower * lower^T", n,
            psi @ psi.transpose() - exact.pascal_symmetric(n),
        )
    )
    b = psi @ lam
    report.add(
        exact._zero_check(
            "binomial transform is an involution", n,
            b @ b - exact.ExactMatrix.identity(n),
        )
    )
    report.add(
        exact._zero_check(
            "dual Gram commutes with the Fourier image", n,
            exact.commutator(exact.dual_S(n), exact.fourier_image_JN(n)),
        )
    )
    return report


# ---------------------------------------------------------------------------
# benchmark

def run_benchmark(
    n: int,
    digits: int = oracle.DEFAULT_DIGITS,
    cache_dir: Optional[str] = None,
) -> List[BenchmarkRow]:
    """Reproduce the eigenvector-error comparison: reference spectrum from
    the high-precision oracle, one binary64 route through the commuting
    Jacobi matrix and one directly from the Pascal matrix."""
    if n < 2:
        raise ValueError("benchmark needs dimension at least 2")
    jn = exact.jacobi_JN(n)
    refs = oracle.cached_spectrum(jn, f"jacobi_n{n}", digits, cache_dir)

    # order references by Pascal eigenvalue (high-precision Rayleigh quotient)
    t_exact = exact.pascal_symmetric(n)
    with mp.workdps(digits + 15):
        t_rows = [[mpf(int(x)) for x in row] for row in t_exact.data]
        keyed = []
        for p in refs:
            tv = [mpmath.fsum(a * b for a, b in zip(row, p.vector)) for row in t_rows]
            keyed.append((mpmath.fsum(a * b for a, b in zip(tv, p.vector)), p))
        keyed.sort(key=lambda kv: kv[0])
    refs_by_t = [p for _, p in keyed]

    via_j = spectral.pascal_eigen_via_J(n)
    direct = spectral.dense_sym_eigen(spectral.pascal_float(n))

    rows = []
    for i in range(n):
        vj = via_j.pairs[i]
        jq, _ = spectral._exact_rayleigh(jn.to_dense(), vj.vector)
        rows.append(
            BenchmarkRow(
                t_eigenvalue=vj.value,
                j_eigenvalue=jq,
                error_via_j=oracle.eigenvector_error(vj.vector, refs_by_t[i]),
                error_via_t=oracle.eigenvector_error(
                    direct.pairs[i].vector, refs_by_t[i]
                ),
            )
        )
    return rows


def _rows_csv(rows: List[BenchmarkRow]) -> str:
    lines = ["t_eigenvalue,j_eigenvalue,error_via_j,error_via_t"]
    for r in rows:
        lines.append(
            f"{r.t_eigenvalue!r},{r.j_eigenvalue!r},{r.error_via_j!r},{r.error_via_t!r}"
        )
    return "\n".join(lines) + "\n"


def _rows_json(rows: List[BenchmarkRow]) -> str:
    return json.dumps(
        [
            {
                "t_eigenvalue": r.t_eigenvalue,
                "j_eigenvalue": r.j_eigenvalue,
                "error_via_j": r.error_via_j,
                "error_via_t": r.error_via_t,
            }
            for r in rows
        ],
        indent=2,
    ) + "\n"


# ---------------------------------------------------------------------------
# eigen / transform / identities

def run_eigen(n: int, route: str) -> spectral.SpectralDecomposition:
    if route == "via-j":
        return spectral.pascal_eigen_via_J(n)
    if route == "direct":
        return spectral.dense_sym_eigen(spectral.pascal_float(n))
    raise ValueError(f"unknown route: {route}")


def _eigen_csv(dec, with_vectors: bool) -> str:
    lines = ["index,eigenvalue,residual" + (",vector" if with_vectors else "")]
    for i, p in enumerate(dec.pairs):
        row = f"{i},{p.value!r},{p.residual!r}"
        if with_vectors:
            row += "," + " ".join(repr(float(x)) for x in p.vector)
        lines.append(row)
    return "\n".join(lines) + "\n"


def _eigen_json(dec, with_vectors: bool) -> str:
    out = []
    for i, p in enumerate(dec.pairs):
        entry = {"index": i, "eigenvalue": p.value, "residual": p.residual}
        if with_vectors:
            entry["vector"] = [float(x) for x in p.vector]
        out.append(entry)
    return json.dumps({"source": dec.source, "pairs": out}, indent=2) + "\n"


def _parse_vector(text: str):
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ValueError("empty input vector")
    return [Fraction(t) for t in tokens]


def run_identities(which: str, bounds: int) -> IdentityReport:
    report = IdentityReport()
    if which in ("all", "orthogonality"):
        report.extend(diffop.orthogonality_check(bounds if bounds else 40))
    if which in ("all", "bispectral"):
        report.extend(diffop.bispectral_check(max(3, min(bounds or 16, 64))))
    if which in ("all", "fubar"):
        for n in range(0, 6):
            for ell in range(0, n + 1):
                sub = diffop.check_identity_fubar(n, ell, 8)
                # the verbatim rows are findings; the aggregate check decides
                report.add(sub.checks[-1])
    if which in ("all", "recovery"):
        x_max = bounds if bounds else 8
        left = diffop.WORD_JACOBI_LINEAR.to_diffop()
        right = diffop.fourier_map(diffop.WORD_JACOBI_LINEAR)
        ok = True
        for ell in range(-1, 2):
            xs, ys = diffop.recover_coefficients(left, right, ell, x_max)
            x_band = left.bands.get(ell)
            y_band = right.bands.get(ell)
            ok = ok and all(
                (x_band.eval(x) if x_band else 0) == s
                for x, s in enumerate(xs)
            )
            ok = ok and all(
                (y_band.eval(y) if y_band else 0) == s
                for y, s in enumerate(ys)
            )
        from .report import Check

        report.add(Check("coefficient recovery round-trip", x_max, ok,
                         0 if ok else 1))
    return report


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _write_output(text: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pascaljacobi",
        description="Pascal matrix spectral toolkit: exact identity "
        "verification and numerically stable diagonalization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the exact identity suites")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--output", default=None)

    p = sub.add_parser("eigen", help="eigendecomposition of the Pascal matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--route", choices=["direct", "via-j"], default="via-j")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--vectors", action="store_true")
    p.add_argument("--output", default=None)

    p = sub.add_parser("benchmark", help="eigenvector error comparison")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--digits", type=int, default=oracle.DEFAULT_DIGITS)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("transform", help="signed binomial transform of a vector")
    p.add_argument("--input", required=True)
    p.add_argument("--float", dest="use_float", action="store_true",
                   help="binary64 arithmetic instead of exact rationals")
    p.add_argument("--output", default=None)

    p = sub.add_parser("identities", help="operator and combinatorial identities")
    p.add_argument("--which",
                   choices=["all", "bispectral", "fubar", "orthogonality",
                            "recovery"],
                   default="all")
    p.add_argument("--bounds", type=int, default=0)
    p.add_argument("--output", default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "verify":
        report = run_verify(args.n_max)
        _write_output("\n".join(report.lines()) + "\n", args.output)
        return 0 if report.passed else 1

    if args.command == "eigen":
        dec = run_eigen(args.n, args.route)
        text = (
            _eigen_csv(dec, args.vectors)
            if args.format == "csv"
            else _eigen_json(dec, args.vectors)
        )
        _write_output(text, args.output)
        return 0

    if args.command == "benchmark":
        rows = run_benchmark(args.n, args.digits, args.cache_dir)
        text = _rows_csv(rows) if args.format == "csv" else _rows_json(rows)
        _write_output(text, args.output)
        return 0

    if args.command == "transform":
        with open(args.input) as fh:
            vec = _parse_vector(fh.read())
        if args.use_float:
            out = spectral.binomial_transform([float(x) for x in vec],
                                              exact_mode=False)
            text = "\n".join(repr(float(x)) for x in out) + "\n"
        else:
            out = spectral.binomial_transform(vec)
            text = "\n".join(str(x) for x in out) + "\n"
        _write_output(text, args.output)
        return 0

    if args.command == "identities":
        report = run_identities(args.which, args.bounds)
        _write_output("\n".join(report.lines()) + "\n", args.output)
        return 0 if report.passed else 1

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
