"""Banded difference operators on functions of a nonnegative integer variable.

An operator is identified with its semi-infinite banded matrix: band k holds
the coefficient of the k-step shift, stored as a polynomial in the row index
plus finitely many boundary overrides.  Functions are extended by zero below
index 0, so composition picks up boundary corrections in the first few rows
(e.g. the left shift followed by the right shift is the identity minus the
projection onto index 0).  With this convention the adjoint is literally the
matrix transpose.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Sequence, Tuple

from . import exact
from .exact import ExactMatrix, binomial
from .report import Check, IdentityReport

Poly = Tuple[Fraction, ...]  # ascending degree, no trailing zeros

# ---------------------------------------------------------------------------
# polynomial helpers


def _pstrip(p) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _pconst(c) -> Poly:
    return _pstrip((Fraction(c),))


def _padd(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return _pstrip(
        tuple(
            (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
        )
    )


def _pneg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def _pscale(p: Poly, s) -> Poly:
    s = Fraction(s)
    return _pstrip(tuple(s * c for c in p))


def _pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _pstrip(tuple(out))


def _pshift(p: Poly, c: int) -> Poly:
    """Coefficients of p(r + c)."""
    if c == 0:
        return p
    res: Poly = ()
    for coef in reversed(p):
        res = _padd(_pmul(res, (Fraction(c), Fraction(1))), _pconst(coef))
    return res


def _peval(p: Poly, r) -> Fraction:
    acc = Fraction(0)
    for coef in reversed(p):
        acc = acc * r + coef
    return acc


def _pfit(samples) -> Poly:
    """Exact interpolating polynomial through (r, value) pairs (Newton form)."""
    pts = list(samples)
    coeffs = [Fraction(v) for _, v in pts]
    xs = [Fraction(r) for r, _ in pts]
    n = len(pts)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (xs[i] - xs[i - j])
    poly: Poly = ()
    for i in range(n - 1, -1, -1):
        poly = _padd(_pmul(poly, (-xs[i], Fraction(1))), _pconst(coeffs[i]))
    return poly


# ---------------------------------------------------------------------------
# bands and operators


@dataclass(frozen=True)
class Band:
    poly: Poly = ()
    fixes: Tuple[Tuple[int, Fraction], ...] = ()

    def eval(self, r: int) -> Fraction:
        for row, val in self.fixes:
            if row == r:
                return val
        return _peval(self.poly, r)

    def is_zero(self) -> bool:
        return not self.poly and not self.fixes


def _make_band(poly: Poly, fixes: Dict[int, Fraction], offset: int) -> Band:
    """Canonicalize: drop overrides matching the polynomial or falling on rows
    where band ``offset`` has no matrix entry (column would be negative)."""
    kept = {}
    for r, v in fixes.items():
        if r < max(0, -offset):
            continue
        if _peval(poly, r) != v:
            kept[r] = Fraction(v)
    return Band(_pstrip(poly), tuple(sorted(kept.items())))


class DiffOp:
    """Banded difference operator with polynomial band coefficients."""

    __slots__ = ("side", "bands")

    def __init__(self, side: str, bands: Dict[int, Band]):
        if side not in ("x", "y"):
            raise ValueError("side must be 'x' or 'y'")
        self.side = side
        self.bands = {k: b for k, b in bands.items() if not b.is_zero()}

    @classmethod
    def from_polys(cls, side: str, polys: Dict[int, Sequence]) -> "DiffOp":
        return cls(
            side,
            {
                k: _make_band(_pstrip(tuple(Fraction(c) for c in p)), {}, k)
                for k, p in polys.items()
            },
        )

    @classmethod
    def identity(cls, side: str) -> "DiffOp":
        return cls.from_polys(side, {0: (1,)})

    @classmethod
    def zero(cls, side: str) -> "DiffOp":
        return cls(side, {})

    @property
    def bandwidth(self) -> int:
        return max((abs(k) for k in self.bands), default=0)

    def _max_fix_row(self) -> int:
        rows = [r for b in self.bands.values() for r, _ in b.fixes]
        return max(rows, default=-1)

    def entry(self, r: int, c: int) -> Fraction:
        if r < 0 or c < 0:
            return Fraction(0)
        band = self.bands.get(c - r)
        return band.eval(r) if band is not None else Fraction(0)

    # -- algebra ------------------------------------------------------------

    def _check_side(self, other: "DiffOp"):
        if self.side != other.side:
            raise ValueError("operators act on different variables")

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check_side(other)
        bands = {}
        for k in set(self.bands) | set(other.bands):
            a = self.bands.get(k, Band())
            b = other.bands.get(k, Band())
            rows = {r for r, _ in a.fixes} | {r for r, _ in b.fixes}
            bands[k] = _make_band(
                _padd(a.poly, b.poly), {r: a.eval(r) + b.eval(r) for r in rows}, k
            )
        return DiffOp(self.side, bands)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __neg__(self) -> "DiffOp":
        return self.scale(-1)

    def scale(self, s) -> "DiffOp":
        s = Fraction(s)
        return DiffOp(
            self.side,
            {
                k: Band(_pscale(b.poly, s), tuple((r, s * v) for r, v in b.fixes))
                for k, b in self.bands.items()
            },
        )

    def __rmul__(self, s):
        if isinstance(s, (int, Fraction)):
            return self.scale(s)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_side(other)
        ma, mb = self.bandwidth, other.bandwidth
        # Polynomial part: plain band convolution with shifted arguments.
        polys: Dict[int, Poly] = {}
        for ka, a in self.bands.items():
            for kb, b in other.bands.items():
                m = ka + kb
                term = _pmul(a.poly, _pshift(b.poly, ka))
                polys[m] = _padd(polys.get(m, ()), term)
        # Boundary rows: recompute entries honestly, dropping contributions
        # that pass through negative intermediate indices and honoring any
        # overrides carried by the factors.
        depth = ma + mb + max(self._max_fix_row(), other._max_fix_row()) + 2
        bands: Dict[int, Band] = {}
        for m, poly in polys.items():
            fixes = {}
            for r in range(depth):
                if r + m < 0:
                    continue
                true_val = Fraction(0)
                for ka, a in self.bands.items():
                    b = other.bands.get(m - ka)
                    if b is None or r + ka < 0:
                        continue
                    true_val += a.eval(r) * b.eval(r + ka)
                fixes[r] = true_val
            bands[m] = _make_band(poly, fixes, m)
        return DiffOp(self.side, bands)

    def adjoint(self) -> "DiffOp":
        """The anti-involution; its matrix is the transpose."""
        bands = {}
        for k, b in self.bands.items():
            bands[-k] = _make_band(
                _pshift(b.poly, -k), {r + k: v for r, v in b.fixes}, -k
            )
        return DiffOp(self.side, bands)

    # -- matrix realization ---------------------------------------------------

    def matrix(self, n: int) -> ExactMatrix:
        """Top-left n x n block of the semi-infinite matrix."""
        if n < 1:
            raise ValueError("dimension must be at least 1")
        m = [[Fraction(0)] * n for _ in range(n)]
        for k, band in self.bands.items():
            for r in range(max(0, -k), n):
                c = r + k
                if 0 <= c < n:
                    m[r][c] = band.eval(r)
        return ExactMatrix(m)

    def apply(self, f: Sequence) -> list:
        """Rows unaffected by truncation of the action on a length-n vector."""
        n = len(f)
        m = self.bandwidth
        if n <= m:
            raise ValueError("vector shorter than the operator bandwidth allows")
        f = [Fraction(v) for v in f]
        out = []
        for r in range(n - m):
            s = Fraction(0)
            for k, band in self.bands.items():
                if r + k < 0:
                    continue
                s += band.eval(r) * f[r + k]
            out.append(s)
        return out

    # -- structure ------------------------------------------------------------

    def is_polynomial(self) -> bool:
        """True when no band carries a boundary override at a live row."""
        return all(not b.fixes for b in self.bands.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.side == other.side and self.bands == other.bands

    def __repr__(self):
        parts = ", ".join(
            f"{k}: {list(b.poly)}{dict(b.fixes) if b.fixes else ''}"
            for k, b in sorted(self.bands.items())
        )
        return f"DiffOp({self.side}; {parts})"

    def to_json(self) -> str:
        if not self.is_polynomial():
            raise ValueError("operators with boundary overrides have no wire form")
        bands = [
            {"k": k, "poly": [str(c) for c in b.poly]}
            for k, b in sorted(self.bands.items())
        ]
        return json.dumps({"side": self.side, "bands": bands})

    @classmethod
    def from_json(cls, text: str) -> "DiffOp":
        obj = json.loads(text)
        return cls.from_polys(
            obj["side"], {int(b["k"]): [Fraction(c) for c in b["poly"]] for b in obj["bands"]}
        )


# ---------------------------------------------------------------------------
# free-function aliases for the operator operations

def op_multiply(a: DiffOp, b: DiffOp) -> DiffOp:
    return a * b


def op_add(a: DiffOp, b: DiffOp) -> DiffOp:
    return a + b


def op_scale(a: DiffOp, s) -> DiffOp:
    return a.scale(s)


def op_adjoint(a: DiffOp) -> DiffOp:
    return a.adjoint()


def matrix_rep(a: DiffOp, n: int) -> ExactMatrix:
    return a.matrix(n)


def apply(a: DiffOp, f: Sequence) -> list:
    return a.apply(f)


# ---------------------------------------------------------------------------
# generators

def var(side: str = "x") -> DiffOp:
    """Multiplication by the variable."""
    return DiffOp.from_polys(side, {0: (0, 1)})


def shift(side: str = "x") -> DiffOp:
    """Forward shift: f(r) -> f(r+1)."""
    return DiffOp.from_polys(side, {1: (1,)})


def shift_adjoint(side: str = "x") -> DiffOp:
    """Backward shift (adjoint of the forward shift)."""
    return DiffOp.from_polys(side, {-1: (1,)})


def lowering(side: str = "x") -> DiffOp:
    """The generator r * (backward shift); vanishes on index 0."""
    return DiffOp.from_polys(side, {-1: (0, 1)})


# x-side generator alphabet
_X_GENERATORS = {
    "X": lambda: var("x"),
    "D": lambda: shift("x"),
    "E": lambda: lowering("x"),
}

# images of the x-side generators under the generalized Fourier map
_Y_IMAGES = {
    "X": lambda: DiffOp.from_polys("y", {0: (0, 1), 1: (1, 1)}),
    "D": lambda: DiffOp.from_polys("y", {0: (1,), -1: (1,)}),
    "E": lambda: DiffOp.from_polys("y", {1: (1, 1)}),
}


@dataclass(frozen=True)
class GeneratorWord:
    """Rational linear combination of noncommuting words over {X, D, E}."""

    terms: Tuple[Tuple[Fraction, str], ...]

    def __post_init__(self):
        for _, word in self.terms:
            bad = set(word) - set("XDE")
            if bad:
                raise ValueError(f"unknown generator letters: {bad}")

    @classmethod
    def make(cls, terms) -> "GeneratorWord":
        return cls(tuple((Fraction(c), w) for c, w in terms))

    def to_diffop(self) -> DiffOp:
        """Realize the word on the x side (letters compose left to right)."""
        total = DiffOp.zero("x")
        for coeff, word in self.terms:
            op = DiffOp.identity("x")
            for letter in word:
                op = op * _X_GENERATORS[letter]()
            total = total + op.scale(coeff)
        return total


# the two operators whose matrices are the linear and cubic Jacobi matrices
WORD_JACOBI_LINEAR = GeneratorWord.make([(1, "DX"), (-1, "X"), (1, "E")])
WORD_JACOBI_CUBIC = GeneratorWord.make(
    [(1, "DXXX"), (1, "XXE"), (-2, "XXX"), (-3, "XX"), (-2, "X")]
)


def fourier_map(word: GeneratorWord) -> DiffOp:
    """Generalized Fourier map on generator words (an anti-homomorphism:
    each word's factor order is reversed before substituting images)."""
    total = DiffOp.zero("y")
    for coeff, w in word.terms:
        op = DiffOp.identity("y")
        for letter in reversed(w):
            op = op * _Y_IMAGES[letter]()
        total = total + op.scale(coeff)
    return total


def fourier_map_numeric(op: DiffOp, n: int) -> ExactMatrix:
    """Finite-section image: transpose of Psi^-1 pi(L) Psi on an enlarged
    truncation, returning the (n - m) x (n - m) block that is exact."""
    if op.side != "x":
        raise ValueError("expected an operator in the x variable")
    m = op.bandwidth
    if n <= 2 * m:
        raise ValueError("truncation too small for the operator bandwidth")
    big = n + m
    psi = exact.pascal_lower(big)
    lam = exact.sign_diagonal(big)
    psi_inv = lam @ psi @ lam
    conj = (psi_inv @ op.matrix(big) @ psi).transpose()
    return conj.submatrix(n - m, n - m)


def diffop_from_matrix(mat: ExactMatrix, bandwidth: int, side: str = "y") -> DiffOp:
    """Reconstruct polynomial bands from a finite section by exact fitting.

    Each band is interpolated through its leading samples degree by degree
    and verified on three further samples; non-polynomial data is rejected.
    """
    n = mat.rows
    bands: Dict[int, Poly] = {}
    for k in range(-bandwidth, bandwidth + 1):
        r0 = max(0, -k)
        samples = [(r, mat.data[r][r + k]) for r in range(r0, n) if r + k < n]
        if len(samples) < 4:
            raise ValueError("section too small to identify the bands")
        for deg in range(len(samples) - 3):
            poly = _pfit(samples[: deg + 1])
            if all(_peval(poly, r) == v for r, v in samples[deg + 1:]):
                break
        else:
            raise ValueError(f"band {k} is not polynomial on the section")
        if poly:
            bands[k] = poly
    return DiffOp.from_polys(side, bands)


# ---------------------------------------------------------------------------
# identity engine

def intertwining_check(left: DiffOp, right: DiffOp, n: int, name: str = "") -> Check:
    """Check pi(L) Psi = Psi pi(R)^T exactly on the rows valid under truncation."""
    if left.side != "x" or right.side != "y":
        raise ValueError("expected an (x-side, y-side) pair")
    m = left.bandwidth
    big = n + m
    psi = exact.pascal_lower(big)
    lhs = left.matrix(big) @ psi
    rhs = psi @ right.matrix(big).transpose()
    defect = (lhs - rhs).submatrix(n, n)
    top, where = defect.max_abs()
    label = name or "intertwining identity"
    return Check(label, n, top == 0, top, where if top != 0 else None)


def bispectral_relations() -> list:
    """The three generating relations as (name, x-side, y-side) pairs."""
    x_var = var("x")
    return [
        ("raise-in-y acts as multiplication by x",
         x_var,
         DiffOp.from_polys("y", {0: (0, 1), 1: (1, 1)})),
        ("lower-in-x acts as multiplication by y",
         x_var - lowering("x"),
         var("y")),
        ("shift-in-x acts as 1 + backward shift in y",
         shift("x"),
         DiffOp.from_polys("y", {0: (1,), -1: (1,)})),
    ]


def bispectral_check(n: int) -> IdentityReport:
    """Verify the three generating relations as exact matrix identities at size n."""
    if n < 3:
        raise ValueError("need n >= 3")
    report = IdentityReport()
    for name, left, right in bispectral_relations():
        report.add(intertwining_check(left, right, n, name))
    return report


def in_fourier_algebra(op: DiffOp) -> bool:
    """Membership test: polynomial bands, and band -k vanishing at 0..k-1."""
    if op.side != "x":
        raise ValueError("membership test applies to x-side operators")
    if not op.is_polynomial():
        return False
    for k, band in op.bands.items():
        if k < 0 and any(_peval(band.poly, r) != 0 for r in range(-k)):
            return False
    return True


def recover_x_band(right: DiffOp, ell: int, x_max: int) -> list:
    """Sample the x-side band at offset ell from its y-side Fourier partner.

    Uses the alternating binomial inversion; the sum is normalized by
    (-1)^(x+ell), without which the raw alternating sum returns the band
    up to sign (see the fubar checker for the same phenomenon).
    """
    if right.side != "y":
        raise ValueError("expected the y-side partner")
    out = []
    for x in range(x_max + 1):
        if x + ell < 0:
            out.append(Fraction(0))
            continue
        tot = Fraction(0)
        for k, band in right.bands.items():
            ylo = max(0, x + ell, -k)
            yhi = x - k
            for y in range(ylo, yhi + 1):
                tot += (
                    (-1) ** y
                    * band.eval(y)
                    * binomial(y, x + ell)
                    * binomial(x, y + k)
                )
        out.append((-1) ** (x + ell) * tot)
    return out


def recover_y_band(left: DiffOp, ell: int, y_max: int) -> list:
    """Sample the y-side band at offset ell from its x-side Fourier preimage."""
    if left.side != "x":
        raise ValueError("expected the x-side operator")
    out = []
    for y in range(y_max + 1):
        if y + ell < 0:
            out.append(Fraction(0))
            continue
        tot = Fraction(0)
        for j, band in left.bands.items():
            xlo = max(0, y - j, -j)
            xhi = y + ell
            for x in range(xlo, xhi + 1):
                tot += (
                    (-1) ** x
                    * band.eval(x)
                    * binomial(y + ell, x)
                    * binomial(x + j, y)
                )
        out.append((-1) ** (y + ell) * tot)
    return out


def recover_coefficients(left: DiffOp, right: DiffOp, ell: int, x_or_y_max: int):
    """Sample band ``ell`` of each partner from the other side's bands.

    ``left`` and ``right`` must be Fourier partners (caller-verified, e.g.
    via ``intertwining_check``).  Returns a pair of sample lists: the x-side
    band of ``left`` recovered from ``right``, and the y-side band of
    ``right`` recovered from ``left``.
    """
    return (
        recover_x_band(right, ell, x_or_y_max),
        recover_y_band(left, ell, x_or_y_max),
    )


def orthogonality_check(x_max: int) -> IdentityReport:
    """Alternating binomial orthogonality, brute force:
    sum_y (-1)^(x+y) C(x,y) C(y,x') = [x == x'] for all x, x' <= x_max.

    The (-1)^x normalization is forced by the involution property of the
    signed lower Pascal matrix; the unsigned variant fails for odd x = x'.
    """
    worst = Fraction(0)
    witness = None
    for x in range(x_max + 1):
        for xp in range(x_max + 1):
            s = sum(
                ((-1) ** (x + y)) * binomial(x, y) * binomial(y, xp)
                for y in range(xp, x + 1)
            )
            defect = s - (1 if x == xp else 0)
            if abs(defect) > abs(worst):
                worst = defect
                witness = (x, xp, s)
    report = IdentityReport()
    report.add(Check("alternating binomial orthogonality", x_max, worst == 0,
                     worst, witness if worst != 0 else None))
    return report


def _fubar_lhs(n: int, ell: int, y: int) -> Fraction:
    return sum(
        (
            Fraction((-1) ** x) * x**n * binomial(y + ell, x) * binomial(x, y)
            for x in range(y, y + ell + 1)
        ),
        Fraction(0),
    )


def _fubar_rhs(n: int, ell: int, y: int) -> Fraction:
    from itertools import combinations_with_replacement

    total = Fraction(0)
    for tup in combinations_with_replacement(range(n - ell + 1), ell):
        idx = (1,) + tup + (n - ell,)
        prod = Fraction(1)
        for j in range(ell + 1):
            prod *= Fraction(y + j) ** (idx[j + 1] - idx[j] + 1)
        total += prod
    return total


def check_identity_fubar(n: int, ell: int, y_max: int) -> IdentityReport:
    """Brute-force both sides of the alternating power-sum identity.

    The stated form is compared verbatim (index convention
    i_0 = 1, i_(ell+1) = n - ell included); a trailing aggregate check
    records whether the two sides agree after the systematic alternating
    factor (-1)^(y+ell), which is what brute force actually finds.
    """
    if not (0 <= ell <= n):
        raise ValueError("need 0 <= ell <= n")
    report = IdentityReport()
    signed_ok = True
    for y in range(y_max + 1):
        lhs = _fubar_lhs(n, ell, y)
        rhs = _fubar_rhs(n, ell, y)
        report.add(
            Check(
                f"power-sum identity verbatim (n={n}, l={ell})",
                y,
                lhs == rhs,
                lhs - rhs,
                (y, str(lhs), str(rhs)) if lhs != rhs else None,
            )
        )
        if lhs != (-1) ** (y + ell) * rhs:
            signed_ok = False
    report.add(
        Check(
            f"power-sum identity with alternating factor (n={n}, l={ell})",
            y_max,
            signed_ok,
            0 if signed_ok else 1,
        )
    )
    return report
