import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pascaljacobi import exact
from pascaljacobi.exact import (
    ExactMatrix,
    ExactTridiagonal,
    binomial,
    commutator,
    dual_S,
    fourier_image_JN,
    jacobi_J,
    jacobi_JN,
    jacobi_Jtilde,
    pascal_lower,
    pascal_symmetric,
    sign_diagonal,
    verify_suite,
)


def binomial_additive(j, k):
    """Independent oracle: Pascal's additive recurrence."""
    if k > j:
        return 0
    row = [1]
    for _ in range(j):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    return row[k]


class TestBinomial:
    def test_examples(self):
        assert binomial(4, 2) == 6
        assert binomial(3, 5) == 0
        assert binomial(28, 14) == 40116600  # checked against additive oracle
        assert binomial(28, 14) == binomial_additive(28, 14)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            binomial(-1, 0)
        with pytest.raises(ValueError):
            binomial(3, -2)

    @given(st.integers(0, 60), st.integers(0, 65))
    @settings(max_examples=60)
    def test_matches_additive_recurrence(self, j, k):
        assert binomial(j, k) == binomial_additive(j, k)

    def test_integer_valued_and_canonical(self):
        for j in range(20):
            for k in range(22):
                b = binomial(j, k)
                assert b.denominator == 1
                assert math.gcd(b.numerator, b.denominator) == 1


class TestConstructors:
    def test_pascal_symmetric_display(self):
        assert pascal_symmetric(3).data == [[1, 1, 1], [1, 2, 3], [1, 3, 6]]
        assert pascal_symmetric(1).data == [[1]]
        assert pascal_symmetric(4)[3, 3] == binomial(6, 3) == 20

    def test_pascal_symmetric_is_symmetric(self):
        t = pascal_symmetric(7)
        assert t == t.transpose()

    def test_pascal_lower_display(self):
        assert pascal_lower(4).data == [
            [1, 0, 0, 0],
            [1, 1, 0, 0],
            [1, 2, 1, 0],
            [1, 3, 3, 1],
        ]
        assert pascal_lower(1).data == [[1]]
        assert pascal_lower(5)[4, 2] == binomial(4, 2)

    def test_sign_diagonal(self):
        assert sign_diagonal(2).data == [[1, 0], [0, -1]]
        assert sign_diagonal(1).data == [[1]]
        d3 = sign_diagonal(3)
        assert [d3[i, i] for i in range(3)] == [1, -1, 1]

    def test_dimension_zero_rejected(self):
        for builder in (pascal_symmetric, pascal_lower, sign_diagonal,
                        jacobi_J, jacobi_Jtilde, jacobi_JN, dual_S,
                        fourier_image_JN):
            with pytest.raises(ValueError):
                builder(0)

    def test_jacobi_blocks(self):
        j3 = jacobi_J(3)
        assert j3.diag == [0, -1, -2] and j3.offdiag == [1, 2]
        jt2 = jacobi_Jtilde(2)
        # beta_1 = -2 - 3 - 2, alpha_1 = 1
        assert jt2.diag == [0, -7] and jt2.offdiag == [1]
        assert jacobi_J(1).diag == [0] and jacobi_J(1).offdiag == []

    def test_jacobi_JN_values(self):
        jn3 = jacobi_JN(3)
        assert jn3.diag == [0, -2, 14] and jn3.offdiag == [8, 10]
        assert jacobi_JN(1).diag == [0]
        assert jacobi_JN(15).offdiag[0] == 15**2 * 1 - 1 == 224

    def test_jacobi_JN_is_combination(self):
        # J_N agrees with n^2 * linear - cubic entrywise on the block
        n = 7
        combo = (
            jacobi_J(n).to_dense().scale(n * n) - jacobi_Jtilde(n).to_dense()
        )
        assert jacobi_JN(n).to_dense() == combo

    def test_dual_S(self):
        assert dual_S(2).data == [[2, 1], [1, 1]]
        assert dual_S(1).data == [[1]]
        n = 2
        expect = [
            [sum(binomial(i, j) * binomial(i, k) for i in range(n))
             for k in range(n)]
            for j in range(n)
        ]
        assert dual_S(n).data == expect

    def test_dual_S_via_exact_inverse(self):
        # S = sign * pascal^-1 * sign using the triangular inverse
        n = 4
        psi, lam = pascal_lower(n), sign_diagonal(n)
        psi_inv = lam @ psi @ lam
        t_inv = psi_inv.transpose() @ psi_inv
        assert (pascal_symmetric(n) @ t_inv) == ExactMatrix.identity(n)
        assert dual_S(n) == lam @ t_inv @ lam

    def test_fourier_image(self):
        f3 = fourier_image_JN(3)
        assert f3.diag == [8, 10, -6] and f3.offdiag == [8, 10]
        assert fourier_image_JN(1).diag == [0]
        # oracle: the direct conjugation product
        for n in (3, 6):
            lam = sign_diagonal(n)
            expect = ExactMatrix.identity(n).scale(n * n - 1) - (
                lam @ jacobi_JN(n).to_dense() @ lam
            )
            assert fourier_image_JN(n).to_dense() == expect
        assert commutator(dual_S(3), fourier_image_JN(3)).is_zero()


class TestCommutator:
    def test_pascal_commutes_at_15(self):
        assert commutator(pascal_symmetric(15), jacobi_JN(15)).is_zero()

    def test_identity_commutes(self):
        a = pascal_symmetric(4)
        assert commutator(ExactMatrix.identity(4), a).is_zero()

    def test_plain_truncation_does_not_commute(self):
        c = commutator(pascal_symmetric(3), jacobi_J(3))
        assert not c.is_zero()
        # independent oracle: dense products
        t, j = pascal_symmetric(3), jacobi_J(3).to_dense()
        assert c == t @ j - j @ t

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            commutator(pascal_symmetric(3), jacobi_JN(4))

    def test_tridiagonal_fast_paths_match_dense(self):
        t = pascal_symmetric(6)
        jn = jacobi_JN(6)
        assert commutator(t, jn) == commutator(t, jn.to_dense())
        assert exact.matmul(jn, t) == jn.to_dense() @ t
        assert exact.matmul(t, jn) == t @ jn.to_dense()


class TestVerifySuite:
    @pytest.mark.parametrize("n", [1, 2, 7, 15])
    def test_all_pass(self, n):
        report = verify_suite(n)
        assert report.passed, report.lines()

    def test_trace_small(self):
        assert jacobi_JN(2).trace() == 3

    def test_failure_carries_witness(self):
        bad = jacobi_JN(4)
        bad = ExactTridiagonal(
            [bad.diag[0] + 1] + bad.diag[1:], bad.offdiag
        )
        c = commutator(pascal_symmetric(4), bad)
        defect, where = c.max_abs()
        assert defect != 0 and where is not None


class TestInvariants:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 9, 14, 20])
    def test_structure_and_commutation(self, n):
        psi = pascal_lower(n)
        lam = sign_diagonal(n)
        assert psi @ psi.transpose() == pascal_symmetric(n)
        b = psi @ lam
        assert b @ b == ExactMatrix.identity(n)
        assert commutator(pascal_symmetric(n), jacobi_JN(n)).is_zero()
        assert commutator(dual_S(n), fourier_image_JN(n)).is_zero()
        assert jacobi_JN(n).trace() == F(n * (n * n - 1), 2)

    @given(st.integers(1, 16))
    @settings(max_examples=12, deadline=None)
    def test_canonical_form(self, n):
        s = dual_S(n)
        for row in s.data:
            for x in row:
                assert math.gcd(x.numerator, x.denominator) == 1
                assert x.denominator >= 1


class TestMatrixPlumbing:
    def test_serialization_round_trip(self):
        m = ExactMatrix([[F(1, 2), F(-3)], [F(10**30), F(7, 11)]])
        text = m.to_json()
        back = ExactMatrix.from_json(text)
        assert back == m
        assert '"entries"' in text and '"rows"' in text

    def test_serialization_big_integers(self):
        t = pascal_symmetric(30)
        assert ExactMatrix.from_json(t.to_json()) == t

    def test_bad_json_rejected(self):
        with pytest.raises(ValueError):
            ExactMatrix.from_json('{"rows": 2, "cols": 2, "entries": [["1","1"]]}')

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            ExactMatrix([[1, 2], [3]])
        with pytest.raises(ValueError):
            ExactMatrix([])
        with pytest.raises(ValueError):
            ExactTridiagonal([1, 2], [1, 2, 3])

    def test_max_abs(self):
        m = ExactMatrix([[0, F(-5, 2)], [1, 2]])
        val, where = m.max_abs()
        assert val == F(5, 2) and where == (0, 1)

    def test_tridiagonal_apply(self):
        jn = jacobi_JN(5)
        v = [F(i + 1, 3) for i in range(5)]
        dense = jn.to_dense()
        expect = [sum(r * x for r, x in zip(row, v)) for row in dense.data]
        assert jn.apply(v) == expect
