"""Binary64 eigensolvers and the numerically stable diagonalization of the
Pascal matrix through its commuting tridiagonal companion.

The tridiagonal solver is the classic implicit-shift QL iteration with
Wilkinson shifts and accumulated rotations; the dense path reduces with
Householder reflectors first.  Pascal eigenvalues are then recovered from
the tridiagonal eigenvectors by an exact rational Rayleigh quotient, which
sidesteps the catastrophic cancellation of multiplying by huge binomials
in floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import numpy as np

from . import exact
from .exact import ExactTridiagonal
from .report import Check, IdentityReport

_EPS = np.finfo(float).eps
_SIGN_THRESHOLD = 1e-12


class ConvergenceError(RuntimeError):
    pass


@dataclass
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


@dataclass
class SpectralDecomposition:
    pairs: List[EigenPair]
    source: str

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.pairs])

    @property
    def vectors(self) -> np.ndarray:
        """Eigenvectors as columns, in pair order."""
        return np.column_stack([p.vector for p in self.pairs])


def fix_sign(v: np.ndarray) -> np.ndarray:
    """First entry larger than the threshold in magnitude is made positive."""
    for x in v:
        if abs(x) > _SIGN_THRESHOLD:
            return -v if x < 0 else v
    return v


def _tql2(d: np.ndarray, e: np.ndarray, z: np.ndarray):
    """Implicit-shift QL with Wilkinson shifts; d/e/z updated in place."""
    n = len(d)
    e = np.append(e, 0.0)
    for l in range(n):
        niter = 0
        while True:
            m = l
            while m < n - 1 and abs(e[m]) > _EPS * (abs(d[m]) + abs(d[m + 1])):
                m += 1
            if m == l:
                break
            niter += 1
            if niter > 30 * max(n, 1):
                raise ConvergenceError(f"QL failed to deflate index {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            broke = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    broke = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[:, i + 1].copy()
                z[:, i + 1] = s * z[:, i] + c * f
                z[:, i] = c * z[:, i] - s * f
            if broke:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, z


def _tridiag_arrays(
    j: Union[ExactTridiagonal, Tuple[Sequence, Sequence]]
) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(j, ExactTridiagonal):
        return (
            np.array([float(x) for x in j.diag]),
            np.array([float(x) for x in j.offdiag]),
        )
    d, e = j
    return np.asarray(d, float), np.asarray(e, float)


def _tridiag_residual(d, e, lam, v) -> float:
    n = len(d)
    av = d * v
    if n > 1:
        av[:-1] += e * v[1:]
        av[1:] += e * v[:-1]
    return float(np.linalg.norm(av - lam * v))


def tridiag_eigen(
    j: Union[ExactTridiagonal, Tuple[Sequence, Sequence]]
) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric tridiagonal matrix."""
    d, e = _tridiag_arrays(j)
    n = len(d)
    z = np.eye(n)
    vals, vecs = _tql2(d.copy(), e.copy(), z)
    order = np.argsort(vals)
    pairs = []
    for idx in order:
        v = fix_sign(vecs[:, idx] / np.linalg.norm(vecs[:, idx]))
        lam = float(vals[idx])
        pairs.append(EigenPair(lam, v, _tridiag_residual(d, e, lam, v)))
    return SpectralDecomposition(pairs, "tridiagonal-QL")


def _householder_tridiagonalize(a: np.ndarray):
    """Reduce a symmetric matrix to tridiagonal form, accumulating the
    orthogonal transform."""
    a = np.array(a, float)
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k]
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(nrm, x[0]) if x[0] != 0 else nrm
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        a[k + 1:, k:] -= 2.0 * np.outer(v, v @ a[k + 1:, k:])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v)
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v)
    d = np.diag(a).copy()
    e = np.diag(a, 1).copy() if n > 1 else np.zeros(0)
    return d, e, q


def dense_sym_eigen(a: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a dense symmetric matrix: Householder reduction
    followed by the tridiagonal QL iteration."""
    a = np.asarray(a, float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise OverflowError("matrix entries are not finite in binary64")
    a = 0.5 * (a + a.T)
    d, e, q = _householder_tridiagonalize(a)
    vals, vecs = _tql2(d, e, q)
    order = np.argsort(vals)
    pairs = []
    for idx in order:
        v = fix_sign(vecs[:, idx] / np.linalg.norm(vecs[:, idx]))
        lam = float(vals[idx])
        res = float(np.linalg.norm(a @ v - lam * v))
        pairs.append(EigenPair(lam, v, res))
    return SpectralDecomposition(pairs, "dense-householder-QL")


def pascal_float(n: int) -> np.ndarray:
    """Symmetric Pascal matrix in binary64; guarded against entry overflow."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    try:
        return np.array(
            [[float(math.comb(j + k, j)) for k in range(n)] for j in range(n)]
        )
    except OverflowError as err:
        raise OverflowError(
            f"Pascal entries overflow binary64 at dimension {n}"
        ) from err


def _exact_rayleigh(mat: exact.ExactMatrix, v: np.ndarray) -> Tuple[float, float]:
    """Rayleigh quotient v^T M v / v^T v with M exact, plus the residual norm.
    The float vector is promoted exactly; the result is rounded once."""
    vq = [Fraction(float(x)) for x in v]
    w = [
        sum((mij * vj for mij, vj in zip(row, vq)), Fraction(0))
        for row in mat.data
    ]
    den = sum((x * x for x in vq), Fraction(0))
    num = sum((a * b for a, b in zip(vq, w)), Fraction(0))
    lam = num / den
    resid2 = sum(((a - lam * b) ** 2 for a, b in zip(w, vq)), Fraction(0)) / den
    return float(lam), math.sqrt(float(resid2))


def pascal_eigen_via_J(n: int) -> SpectralDecomposition:
    """Eigenbasis of the Pascal matrix obtained from its commuting Jacobi
    matrix; Pascal eigenvalues recovered by exact Rayleigh quotients."""
    base = tridiag_eigen(exact.jacobi_JN(n))
    t = exact.pascal_symmetric(n)
    pairs = []
    for p in base.pairs:
        lam, res = _exact_rayleigh(t, p.vector)
        pairs.append(EigenPair(lam, p.vector, res))
    pairs.sort(key=lambda p: p.value)
    return SpectralDecomposition(pairs, "via-J")


def binomial_transform(v: Sequence, exact_mode: bool = True):
    """Signed binomial transform: s_n = sum_k C(n,k) (-1)^k v_k.

    Exact mode takes and returns rationals; float mode works in binary64.
    """
    n = len(v)
    if n < 1:
        raise ValueError("empty vector")
    if exact_mode:
        vq = [Fraction(x) if not isinstance(x, Fraction) else x for x in v]
        return [
            sum(
                (exact.binomial(i, k) * ((-1) ** k) * vq[k] for k in range(i + 1)),
                Fraction(0),
            )
            for i in range(n)
        ]
    vf = np.asarray(v, float)
    psi_lam = np.array(
        [[float(math.comb(i, k)) * (-1) ** k if k <= i else 0.0 for k in range(n)]
         for i in range(n)]
    )
    return psi_lam @ vf


def reflection_check(n: int, dec: SpectralDecomposition) -> IdentityReport:
    """Spectrum reflection for the commuting Jacobi matrix: eigenvalues pair
    to n^2 - 1 and the binomial transform swaps the paired eigenvectors."""
    report = IdentityReport()
    vals = dec.values
    tol = 1e-9 * n * n
    worst = 0.0
    witness = None
    for i in range(n):
        defect = abs(vals[i] + vals[n - 1 - i] - (n * n - 1))
        if defect > worst:
            worst = defect
            witness = (i, n - 1 - i)
    report.add(Check("eigenvalues pair to n^2-1", n, worst <= tol, worst, witness))

    worst_cos = 1.0
    witness = None
    for i in range(n):
        w = np.array(
            [float(x) for x in binomial_transform([Fraction(float(t)) for t in dec.pairs[i].vector])]
        )
        partner = dec.pairs[n - 1 - i].vector
        cos = abs(float(w @ partner) / (np.linalg.norm(w) * np.linalg.norm(partner)))
        if cos < worst_cos:
            worst_cos = cos
            witness = (i, n - 1 - i, cos)
    report.add(
        Check("binomial transform swaps paired eigenvectors", n,
              worst_cos >= 1.0 - 1e-8, 1.0 - worst_cos, witness)
    )
    if n % 2 == 1:
        mid = (n * n - 1) / 2.0
        present = bool(np.min(np.abs(vals - mid)) <= tol)
        report.add(Check("middle eigenvalue (n^2-1)/2 present", n, present,
                         float(np.min(np.abs(vals - mid)))))
    return report


def middle_eigenvector(n: int) -> list:
    """Exact rational eigenvector shared by the Pascal matrix (eigenvalue 1),
    the commuting Jacobi matrix (eigenvalue (n^2-1)/2) and the binomial
    transform (eigenvalue +1), for odd n.

    Built by the three-term recursion seeded with 1, 1/2; every stated
    eigen-property is asserted exactly before returning.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError("defined for odd dimensions only")
    if n == 1:
        return [Fraction(1)]
    n2 = n * n
    v = [Fraction(1), Fraction(1, 2)]
    for k in range(1, n - 1):
        num = (
            Fraction(n2 - 1, 2) * v[k]
            + k * (n2 - 2 * k * k - 3 * k - 2) * v[k]
            - k * (n2 - k * k) * v[k - 1]
        )
        den = (k + 1) * (n2 - (k + 1) ** 2)
        v.append(num / den)

    lam = Fraction(n2 - 1, 2)
    jn = exact.jacobi_JN(n)
    assert jn.apply(v) == [lam * x for x in v], "Jacobi eigen-property failed"
    assert binomial_transform(v) == v, "binomial transform fixed-point failed"
    t = exact.pascal_symmetric(n)
    tv = [
        sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in t.data
    ]
    assert tv == v, "Pascal eigen-property failed"
    return v


def binomial_eigenbasis(n: int) -> List[Tuple[np.ndarray, int]]:
    """Orthogonal-free eigenbasis of the binomial transform: n unit vectors
    with eigenvalue +1 or -1, built from the commuting Jacobi eigenpairs."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if n == 1:
        return [(np.array([1.0]), 1)]
    dec = tridiag_eigen(exact.jacobi_JN(n))
    out: List[Tuple[np.ndarray, int]] = []
    for i in range(n // 2):
        vq = [Fraction(float(x)) for x in dec.pairs[i].vector]
        w = binomial_transform(vq)
        for sign in (1, -1):
            u = [a + sign * b for a, b in zip(vq, w)]
            uf = np.array([float(x) for x in u])
            uf = fix_sign(uf / np.linalg.norm(uf))
            out.append((uf, sign))
    if n % 2 == 1:
        v = middle_eigenvector(n)
        vf = np.array([float(x) for x in v])
        vf = fix_sign(vf / np.linalg.norm(vf))
        out.append((vf, 1))
    return out


def binomial_involution_residual(u: np.ndarray, sign: int) -> float:
    """Exact-arithmetic residual of the eigen-relation of the binomial
    transform for a float vector, rounded once at the end."""
    uq = [Fraction(float(x)) for x in u]
    w = binomial_transform(uq)
    resid2 = sum(((a - sign * b) ** 2 for a, b in zip(w, uq)), Fraction(0))
    norm2 = sum((b * b for b in uq), Fraction(0))
    return math.sqrt(float(resid2 / norm2))
