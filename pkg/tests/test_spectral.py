import math
from fractions import Fraction as F

import numpy as np
import pytest

from pascaljacobi import exact
from pascaljacobi.spectral import (
    binomial_eigenbasis,
    binomial_involution_residual,
    binomial_transform,
    dense_sym_eigen,
    fix_sign,
    middle_eigenvector,
    pascal_eigen_via_J,
    pascal_float,
    reflection_check,
    tridiag_eigen,
)

# Largest Pascal eigenvalue at dimension 15, frozen from a 200-digit
# Sturm-bisection run (independent of the binary64 solver under test).
T15_LARGEST = 53288277.51020229


class TestTridiagQL:
    def test_trivial_one_by_one(self):
        dec = tridiag_eigen(([7.0], []))
        assert dec.values[0] == 7.0
        assert dec.pairs[0].vector[0] == 1.0

    def test_diagonal_matrix(self):
        dec = tridiag_eigen(([3.0, 1.0, 2.0], [0.0, 0.0]))
        assert np.allclose(dec.values, [1.0, 2.0, 3.0])

    def test_known_two_by_two(self):
        # [[0, 1], [1, 0]] has eigenvalues -1 and 1
        dec = tridiag_eigen(([0.0, 0.0], [1.0]))
        assert np.allclose(dec.values, [-1.0, 1.0], atol=1e-14)
        assert np.allclose(np.abs(dec.pairs[0].vector), 1 / math.sqrt(2))

    def test_j3_contains_four(self):
        # diag (0, -2, 14), offdiag (8, 10): one eigenvalue is exactly 4
        dec = tridiag_eigen(exact.jacobi_JN(3))
        assert min(abs(dec.values - 4.0)) <= 1e-12

    def test_j15_extreme_eigenvalues(self):
        dec = tridiag_eigen(exact.jacobi_JN(15))
        assert abs(dec.values[0] - (-2935.448775251794)) <= 1e-8
        assert abs(dec.values[-1] - 3159.448775251794) <= 1e-8

    @pytest.mark.parametrize("n", [2, 5, 16, 33, 64])
    def test_residuals_and_orthonormality(self, n):
        jn = exact.jacobi_JN(n)
        dec = tridiag_eigen(jn)
        norm = max(
            abs(float(jn.diag[i]))
            + (abs(float(jn.offdiag[i - 1])) if i > 0 else 0)
            + (abs(float(jn.offdiag[i])) if i < n - 1 else 0)
            for i in range(n)
        )
        for p in dec.pairs:
            assert p.residual <= 1e-11 * norm
        v = dec.vectors
        assert np.max(np.abs(v.T @ v - np.eye(n))) <= 1e-12

    def test_sorted_ascending(self):
        dec = tridiag_eigen(exact.jacobi_JN(20))
        assert np.all(np.diff(dec.values) >= 0)

    def test_source_label(self):
        assert tridiag_eigen(([1.0], [])).source == "tridiagonal-QL"


class TestDenseRoute:
    def test_diagonal(self):
        dec = dense_sym_eigen(np.diag([1.0, 2.0, 3.0]))
        assert np.allclose(dec.values, [1.0, 2.0, 3.0])

    def test_pascal_det_one(self):
        # the Pascal matrix is unimodular; the eigenvalue product is 1
        dec = dense_sym_eigen(pascal_float(4))
        assert abs(np.prod(dec.values) - 1.0) <= 1e-12

    def test_pascal_15_largest(self):
        dec = dense_sym_eigen(pascal_float(15))
        assert abs(dec.values[-1] - T15_LARGEST) <= 1e-8 * T15_LARGEST

    def test_reciprocal_pairing_via_commuting_route(self):
        # spectrum of the Pascal matrix is closed under inversion; the
        # commuting-matrix route preserves this, the direct route does not
        for n in range(1, 21):
            vals = pascal_eigen_via_J(n).values
            prods = vals * vals[::-1]
            assert np.max(np.abs(prods - 1.0)) <= 1e-6, n

    def test_direct_route_breaks_reciprocity_at_15(self):
        vals = dense_sym_eigen(pascal_float(15)).values
        assert abs(vals[0] * vals[-1] - 1.0) > 1e-3

    def test_residuals_small(self):
        a = pascal_float(12)
        dec = dense_sym_eigen(a)
        norm = np.max(np.abs(a).sum(axis=1))
        for p in dec.pairs:
            assert p.residual <= 1e-11 * norm

    def test_rejects_nonsquare_and_overflow(self):
        with pytest.raises(ValueError):
            dense_sym_eigen(np.ones((2, 3)))
        with pytest.raises(OverflowError):
            pascal_float(600)


class TestViaJRoute:
    def test_matches_direct_route_on_largest(self):
        n = 15
        direct = dense_sym_eigen(pascal_float(n))
        via = pascal_eigen_via_J(n)
        v1 = fix_sign(direct.pairs[-1].vector)
        v2 = fix_sign(via.pairs[-1].vector)
        assert np.linalg.norm(v1 - v2) <= 1e-8
        assert abs(via.values[-1] - T15_LARGEST) <= 1e-6 * T15_LARGEST

    def test_small_eigenvalues_beat_direct_route(self):
        # the point of the commuting-matrix route: clustered tiny
        # eigenvalues of the Pascal matrix come out far more accurately
        n = 15
        direct = dense_sym_eigen(pascal_float(n))
        via = pascal_eigen_via_J(n)
        assert via.values[0] > 0
        # exact reciprocal check: lambda_min = 1 / lambda_max
        rel_via = abs(via.values[0] * via.values[-1] - 1.0)
        rel_direct = abs(direct.values[0] * direct.values[-1] - 1.0)
        assert rel_via <= 1e-10
        assert rel_via < rel_direct

    def test_residuals_exactly_computed(self):
        via = pascal_eigen_via_J(10)
        for p in via.pairs:
            assert p.residual <= 1e-9 * via.values[-1]

    def test_source_label(self):
        assert pascal_eigen_via_J(3).source == "via-J"


class TestBinomialTransform:
    def test_examples(self):
        assert binomial_transform([1, 0, 0]) == [1, 1, 1]
        assert binomial_transform([1, 1, 1]) == [1, 0, 0]
        assert binomial_transform([F(1), F(1, 2), F(-1, 2)]) == [
            F(1),
            F(1, 2),
            F(-1, 2),
        ]

    def test_is_involution(self):
        v = [F(3, 7), F(-2), F(5, 11), F(0), F(9, 4)]
        assert binomial_transform(binomial_transform(v)) == v

    def test_float_mode_matches(self):
        v = [0.5, -1.25, 2.0, 3.5]
        out = binomial_transform(v, exact_mode=False)
        expect = [float(x) for x in binomial_transform([F(x) for x in v])]
        assert np.allclose(out, expect)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            binomial_transform([])


class TestReflection:
    @pytest.mark.parametrize("n", list(range(2, 21)))
    def test_spectrum_reflects(self, n):
        dec = tridiag_eigen(exact.jacobi_JN(n))
        report = reflection_check(n, dec)
        assert report.passed, "\n".join(report.lines())

    def test_middle_check_present_only_for_odd(self):
        odd = reflection_check(5, tridiag_eigen(exact.jacobi_JN(5)))
        even = reflection_check(6, tridiag_eigen(exact.jacobi_JN(6)))
        assert len(odd.checks) == 3 and len(even.checks) == 2


class TestMiddleEigenvector:
    def test_small_cases(self):
        assert middle_eigenvector(1) == [F(1)]
        assert middle_eigenvector(3) == [F(1), F(1, 2), F(-1, 2)]

    @pytest.mark.parametrize("n", [5, 7, 15, 31])
    def test_exact_eigenproperties(self, n):
        v = middle_eigenvector(n)  # constructor asserts all three relations
        assert len(v) == n and v[0] == 1 and v[1] == F(1, 2)
        # re-verify the Jacobi relation independently here
        lam = F(n * n - 1, 2)
        assert exact.jacobi_JN(n).apply(v) == [lam * x for x in v]

    def test_even_dimension_rejected(self):
        with pytest.raises(ValueError):
            middle_eigenvector(4)


class TestBinomialEigenbasis:
    @pytest.mark.parametrize("n", [1, 2, 3, 8, 15, 20])
    def test_counts_and_residuals(self, n):
        basis = binomial_eigenbasis(n)
        assert len(basis) == n
        signs = [s for _, s in basis]
        assert signs.count(1) - signs.count(-1) == (1 if n % 2 else 0)
        for u, s in basis:
            assert abs(np.linalg.norm(u) - 1.0) <= 1e-12
            assert binomial_involution_residual(u, s) <= 1e-10

    def test_basis_spans(self):
        n = 7
        m = np.column_stack([u for u, _ in binomial_eigenbasis(n)])
        assert np.linalg.matrix_rank(m, tol=1e-8) == n

    def test_sign_flip_detected(self):
        u, s = binomial_eigenbasis(4)[0]
        assert binomial_involution_residual(u, -s) > 0.1


class TestFixSign:
    def test_flips_negative_leader(self):
        v = np.array([-0.5, 0.2])
        assert fix_sign(v)[0] == 0.5

    def test_skips_negligible_entries(self):
        v = np.array([1e-15, -0.9])
        assert fix_sign(v)[1] == 0.9
