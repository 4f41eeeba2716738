"""Arbitrary-precision reference eigensolver for the exact tridiagonal
matrices: certified Sturm bisection for eigenvalues and high-precision
inverse iteration for eigenvectors.

This plays the role of the "true" spectrum against which the binary64
routes are measured.  Bisection gives certified enclosures (the sign-count
is checked at both ends of every final interval), and the tridiagonal
structure keeps the shifted solves cheap.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import mpmath
from mpmath import mp, mpf

from .exact import ExactTridiagonal

DEFAULT_DIGITS = 200
MIN_DIGITS = 50
_GUARD = 15  # extra working digits
_ENV_CACHE = "PASCALJACOBI_CACHE_DIR"
_SIGN_THRESHOLD = mpf("1e-12")


@dataclass
class HPEigenPair:
    value: mpf
    vector: List[mpf]
    interval_width: mpf
    digits: int


def _int_entries(j: ExactTridiagonal):
    if any(x.denominator != 1 for x in j.diag + j.offdiag):
        raise ValueError("oracle expects exact integer entries")
    return [int(x) for x in j.diag], [int(x) for x in j.offdiag]


def _norm_inf(d: Sequence[int], e: Sequence[int]) -> int:
    n = len(d)
    best = 0
    for i in range(n):
        s = abs(d[i])
        if i > 0:
            s += abs(e[i - 1])
        if i < n - 1:
            s += abs(e[i])
        best = max(best, s)
    return max(best, 1)


def _sturm_count(d, e2, sigma, pivmin) -> int:
    """Number of eigenvalues strictly below sigma (LAPACK-style pivot guard)."""
    count = 0
    q = d[0] - sigma
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        q = d[i] - sigma - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def _check_digits(digits: int):
    if digits < MIN_DIGITS:
        raise ValueError(f"precision must be at least {MIN_DIGITS} digits")


def hp_eigenvalues(
    j: ExactTridiagonal, digits: int = DEFAULT_DIGITS, with_intervals: bool = False
):
    """All eigenvalues by certified Sturm bisection, ascending.

    Each returned value is the midpoint of an interval of width at most
    10^(5 - digits) * ||J||_inf certified (by sign counts at both ends)
    to contain exactly one eigenvalue.
    """
    _check_digits(digits)
    d_int, e_int = _int_entries(j)
    n = len(d_int)
    with mp.workdps(digits + _GUARD):
        d = [mpf(x) for x in d_int]
        e2 = [mpf(x) ** 2 for x in e_int]
        norm = mpf(_norm_inf(d_int, e_int))
        pivmin = mpf(10) ** (-2 * (digits + _GUARD)) * norm**2
        tol = mpf(10) ** (-(digits - 5)) * norm
        if n == 1:
            out = [(d[0], mpf(0))]
        else:
            lo0 = min(
                d_int[i]
                - (abs(e_int[i - 1]) if i > 0 else 0)
                - (abs(e_int[i]) if i < n - 1 else 0)
                for i in range(n)
            ) - 1
            hi0 = max(
                d_int[i]
                + (abs(e_int[i - 1]) if i > 0 else 0)
                + (abs(e_int[i]) if i < n - 1 else 0)
                for i in range(n)
            ) + 1
            out = []
            for idx in range(n):
                lo, hi = mpf(lo0), mpf(hi0)
                while True:
                    mid = (lo + hi) / 2
                    if _sturm_count(d, e2, mid, pivmin) <= idx:
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo <= tol:
                        below = _sturm_count(d, e2, lo, pivmin)
                        above = _sturm_count(d, e2, hi, pivmin)
                        if below == idx and above == idx + 1:
                            break
                out.append(((lo + hi) / 2, hi - lo))
        if with_intervals:
            return out
        return [v for v, _ in out]


def _tridiag_solve(d, e, rhs):
    """Solve the symmetric tridiagonal system by elimination with partial
    pivoting (stable for the nearly singular shifted systems used here)."""
    n = len(d)
    # rows: [sub, diag, super, super2], built as we eliminate
    a = [mpf(0)] + [mpf(x) for x in e]          # subdiagonal a[i] couples i,i-1
    b = [mpf(x) for x in d]                     # diagonal
    c = [mpf(x) for x in e] + [mpf(0)]          # superdiagonal
    f = [mpf(0)] * n                            # second superdiagonal (fill-in)
    r = [mpf(x) for x in rhs]
    for i in range(n - 1):
        if abs(a[i + 1]) > abs(b[i]):
            # swap rows i and i+1
            b[i], a[i + 1] = a[i + 1], b[i]
            c[i], b[i + 1] = b[i + 1], c[i]
            f[i], c[i + 1] = c[i + 1], f[i]
            r[i], r[i + 1] = r[i + 1], r[i]
        if b[i] == 0:
            raise ZeroDivisionError("exactly singular shift")
        m = a[i + 1] / b[i]
        b[i + 1] -= m * c[i]
        c[i + 1] -= m * f[i]
        r[i + 1] -= m * r[i]
    x = [mpf(0)] * n
    for i in range(n - 1, -1, -1):
        if b[i] == 0:
            raise ZeroDivisionError("exactly singular shift")
        s = r[i]
        if i + 1 < n:
            s -= c[i] * x[i + 1]
        if i + 2 < n:
            s -= f[i] * x[i + 2]
        x[i] = s / b[i]
    return x


def _hp_fix_sign(v):
    for x in v:
        if abs(x) > _SIGN_THRESHOLD:
            return [-y for y in v] if x < 0 else v
    return v


def _hp_normalize(v):
    norm = mpmath.sqrt(mpmath.fsum(x * x for x in v))
    return [x / norm for x in v]


def hp_eigenvector(
    j: ExactTridiagonal,
    lam: mpf,
    digits: int = DEFAULT_DIGITS,
    interval_width: Optional[mpf] = None,
) -> HPEigenPair:
    """Inverse iteration at an isolated eigenvalue approximation."""
    _check_digits(digits)
    d_int, e_int = _int_entries(j)
    n = len(d_int)
    with mp.workdps(digits + _GUARD):
        lam = mpf(lam)
        width = mpf(interval_width) if interval_width is not None else (
            mpf(10) ** (-(digits - 5)) * _norm_inf(d_int, e_int)
        )
        if n == 1:
            return HPEigenPair(mpf(d_int[0]), [mpf(1)], mpf(0), digits)
        tol = mpf(10) ** (-(digits - 10))
        shift = lam
        for attempt in range(4):
            try:
                d = [mpf(x) - shift for x in d_int]
                v = _hp_normalize([mpf(1) + mpf(i) / n for i in range(n)])
                prev = None
                for _ in range(25):
                    v = _hp_normalize(_tridiag_solve(d, e_int, v))
                    v = _hp_fix_sign(v)
                    if prev is not None:
                        change = mpmath.sqrt(
                            mpmath.fsum((a - b) ** 2 for a, b in zip(v, prev))
                        )
                        if change <= tol:
                            return HPEigenPair(lam, v, width, digits)
                    prev = v
                raise RuntimeError("inverse iteration failed to settle")
            except ZeroDivisionError:
                # shift hit an exact eigenvalue; nudge by one interval width
                shift = lam + (width if width > 0 else tol)
        raise RuntimeError("inverse iteration could not find a usable shift")


def hp_spectrum(j: ExactTridiagonal, digits: int = DEFAULT_DIGITS) -> List[HPEigenPair]:
    """Certified eigenvalues with their high-precision eigenvectors."""
    vals = hp_eigenvalues(j, digits, with_intervals=True)
    return [hp_eigenvector(j, v, digits, w) for v, w in vals]


def hp_residual(j: ExactTridiagonal, pair: HPEigenPair) -> mpf:
    """||J v - lambda v||_2 evaluated at the pair's working precision."""
    d_int, e_int = _int_entries(j)
    n = len(d_int)
    with mp.workdps(pair.digits + _GUARD):
        v = pair.vector
        parts = []
        for i in range(n):
            s = mpf(d_int[i]) * v[i]
            if i > 0:
                s += mpf(e_int[i - 1]) * v[i - 1]
            if i < n - 1:
                s += mpf(e_int[i]) * v[i + 1]
            parts.append((s - pair.value * v[i]) ** 2)
        return mpmath.sqrt(mpmath.fsum(parts))


def eigenvector_error(computed, reference: HPEigenPair) -> float:
    """l2 norm of the difference from the reference eigenvector, evaluated
    in high precision (both sides under the common sign convention)."""
    if len(computed) != len(reference.vector):
        raise ValueError("length mismatch")
    with mp.workdps(reference.digits + _GUARD):
        a = _hp_fix_sign([mpf(float(x)) for x in computed])
        b = _hp_fix_sign(reference.vector)
        return float(mpmath.sqrt(mpmath.fsum((x - y) ** 2 for x, y in zip(a, b))))


# ---------------------------------------------------------------------------
# disk cache

def cache_directory(cache_dir: Optional[str] = None) -> Path:
    if cache_dir:
        return Path(cache_dir)
    env = os.environ.get(_ENV_CACHE)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "pascaljacobi"


def _mpf_str(x: mpf, digits: int) -> str:
    return mpmath.nstr(x, digits + 10, strip_zeros=False)


def spectrum_to_json(n: int, digits: int, pairs: List[HPEigenPair]) -> str:
    with mp.workdps(digits + _GUARD):
        return json.dumps(
            {
                "n": n,
                "digits": digits,
                "values": [_mpf_str(p.value, digits) for p in pairs],
                "widths": [_mpf_str(p.interval_width, digits) for p in pairs],
                "vectors": [
                    [_mpf_str(x, digits) for x in p.vector] for p in pairs
                ],
            }
        )


def spectrum_from_json(text: str) -> List[HPEigenPair]:
    obj = json.loads(text)
    digits = obj["digits"]
    with mp.workdps(digits + _GUARD):
        return [
            HPEigenPair(
                mpf(v), [mpf(x) for x in vec], mpf(w), digits
            )
            for v, w, vec in zip(obj["values"], obj["widths"], obj["vectors"])
        ]


def cached_spectrum(
    j: ExactTridiagonal,
    key: str,
    digits: int = DEFAULT_DIGITS,
    cache_dir: Optional[str] = None,
) -> List[HPEigenPair]:
    """Spectrum with a transparent disk cache keyed by (key, digits)."""
    directory = cache_directory(cache_dir)
    path = directory / f"{key}_d{digits}.json"
    if path.exists():
        try:
            return spectrum_from_json(path.read_text())
        except (ValueError, KeyError, json.JSONDecodeError):
            pass  # corrupt cache entry: recompute
    pairs = hp_spectrum(j, digits)
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(spectrum_to_json(j.n, digits, pairs))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return pairs
