"""Overlap function routes, closed forms, and degenerate kinds."""

from dataclasses import replace
from fractions import Fraction

import pytest

from tdpair.exactfield import (
    RationalFunction,
    ZeroDenominatorPochhammer,
    limit_at_zero,
    pochhammer,
    variable_t,
)
from tdpair.multiindex import IndexOutOfRange, Shape, enumerate_box
from tdpair.cob import coefficient_matrix
from tdpair.tdcore import ExactMatrix, InvalidParameters, TDParameters
from tdpair.overlap import (
    RacahFactorSpec,
    ShiftedFunctional,
    overlap_T,
    overlap_U,
    overlap_limit_kind,
    overlap_table,
    univariate_t_racah,
    univariate_u_balanced,
    univariate_u_racah_normalized,
)

F = Fraction

T_METHODS = ("direct_sum", "matrix_product", "shift_operator")
U_METHODS = ("direct_sum", "shift_operator", "linear_solve")


def _params_1d():
    return TDParameters(Shape((1,)), 0, 0, 1, 1, 0, 0, (1,))


def _params_2d():
    return TDParameters(
        Shape((1, 1)), F(1, 2), F(-1, 3), 2, 3, F(1, 3), F(1, 5), (F(1, 7), F(3, 11))
    )


def _params_21():
    return TDParameters(Shape((2, 1)), 0, 0, 1, 1, F(1, 3), F(1, 5), (F(1, 7), F(3, 11)))


def _params_111():
    return TDParameters(
        Shape((1, 1, 1)), 0, 1, -1, 3, F(2, 7), F(1, 5), (F(1, 7), F(3, 11), F(5, 13))
    )


def _params_univariate(ell=3):
    return TDParameters(Shape((ell,)), 0, 0, 1, 1, F(1, 3), F(1, 5), (F(1, 7),))


class TestFrozenTables:
    """The hand-checkable ell = (1) instance."""

    def test_t_values_every_method(self):
        p = _params_1d()
        expected = {((0,), (0,)): 1, ((0,), (1,)): 3, ((1,), (0,)): 1, ((1,), (1,)): 4}
        for (i, x), v in expected.items():
            for m in T_METHODS:
                assert overlap_T(p, i, x, m) == v

    def test_u_values_every_method(self):
        p = _params_1d()
        expected = {((0,), (0,)): 4, ((0,), (1,)): -1, ((1,), (0,)): -3, ((1,), (1,)): 1}
        for (i, x), v in expected.items():
            for m in U_METHODS:
                assert overlap_U(p, i, x, m) == v

    def test_biorthogonality_cross_term(self):
        p = _params_1d()
        total = sum(
            overlap_T(p, (0,), (x,), "direct_sum") * overlap_U(p, (1,), (x,), "direct_sum")
            for x in range(2)
        )
        assert total == 0

    def test_origin_is_one(self):
        # only the n = 0 term contributes and every Pochhammer is empty
        for p in (_params_1d(), _params_2d(), _params_21()):
            z = tuple(0 for _ in range(p.N))
            assert overlap_T(p, z, z, "direct_sum") == 1


class TestMethodAgreement:
    @pytest.mark.parametrize("params", [_params_2d(), _params_21(), _params_111()])
    def test_t_routes_coincide(self, params):
        idx = enumerate_box(params.shape)
        for i in idx:
            for x in idx:
                ref = overlap_T(params, i, x, "direct_sum")
                assert overlap_T(params, i, x, "matrix_product") == ref
                assert overlap_T(params, i, x, "shift_operator") == ref

    @pytest.mark.parametrize("params", [_params_2d(), _params_21(), _params_111()])
    def test_u_routes_coincide(self, params):
        idx = enumerate_box(params.shape)
        for i in idx:
            for x in idx:
                ref = overlap_U(params, i, x, "direct_sum")
                assert overlap_U(params, i, x, "shift_operator") == ref
                assert overlap_U(params, i, x, "linear_solve") == ref

    def test_table_matches_pointwise(self):
        p = _params_21()
        basis = enumerate_box(p.shape)
        for method in T_METHODS:
            m = overlap_table(p, "T", method)
            for r, i in enumerate(basis):
                for c, x in enumerate(basis):
                    assert m.item(r, c) == overlap_T(p, i, x, "direct_sum")


class TestBasisIdentities:
    @pytest.mark.parametrize("params", [_params_1d(), _params_2d(), _params_21()])
    def test_eigenvector_expansions(self, params):
        mc = coefficient_matrix(params, "C")
        md = coefficient_matrix(params, "D")
        mt = overlap_table(params, "T", "matrix_product")
        mu = overlap_table(params, "U", "linear_solve")
        assert md == mc @ mt.transpose()
        assert mc == md @ mu

    @pytest.mark.parametrize("params", [_params_1d(), _params_2d(), _params_21()])
    def test_biorthogonality(self, params):
        mt = overlap_table(params, "T", "direct_sum")
        mu = overlap_table(params, "U", "direct_sum")
        I = ExactMatrix.identity(mt.basis)
        assert mt @ mu.transpose() == I


class TestUnivariateForms:
    def test_t_closed_form(self):
        p = _params_univariate()
        for i in range(4):
            for x in range(4):
                assert univariate_t_racah(p, (i,), (x,)) == overlap_T(p, (i,), (x,))

    @pytest.mark.parametrize("ell", [1, 2, 3, 4])
    def test_u_closed_forms(self, ell):
        p = _params_univariate(ell)
        for i in range(ell + 1):
            for x in range(ell + 1):
                ref = overlap_U(p, (i,), (x,))
                assert univariate_u_balanced(p, (i,), (x,)) == ref
                assert univariate_u_racah_normalized(p, (i,), (x,)) == ref

    def test_multivariate_rejected(self):
        p = _params_2d()
        with pytest.raises(ValueError, match="single coordinate"):
            univariate_t_racah(p, (0, 0), (0, 0))
        with pytest.raises(ValueError, match="single coordinate"):
            univariate_u_balanced(p, (0, 0), (0, 0))


class TestLimitKinds:
    def _inv_t(self):
        return RationalFunction((F(1),), (F(0), F(1)))

    @pytest.mark.parametrize(
        "ell,a",
        [((2,), (F(3, 2),)), ((1, 1), (F(1), F(3, 7)))],
    )
    def test_level_linear_starred_spectrum(self, ell, a):
        # dropping the quadratic term of theta* turns T into the Hahn kind
        p = TDParameters(Shape(ell), 0, 0, 1, 1, F(1, 3), F(1, 5), a)
        t = variable_t()
        pt = replace(p, h_star=p.h_star * t, omega_star=self._inv_t())
        for i in enumerate_box(p.shape):
            for x in enumerate_box(p.shape):
                lim = limit_at_zero(overlap_T(pt, i, x, "direct_sum"))
                assert lim == overlap_limit_kind(p, "hahn", i, x)

    @pytest.mark.parametrize(
        "ell,a",
        [((2,), (F(3, 2),)), ((1, 1), (F(1), F(3, 7)))],
    )
    def test_both_spectra_linear(self, ell, a):
        p = TDParameters(Shape(ell), 0, 0, 1, 1, F(1, 3), F(1, 5), a)
        t = variable_t()
        pt = replace(p, h=p.h * t, omega=self._inv_t())
        for i in enumerate_box(p.shape):
            for x in enumerate_box(p.shape):
                lim = limit_at_zero(overlap_limit_kind(pt, "hahn", i, x))
                assert lim == overlap_limit_kind(p, "krawtchouk", i, x)

    def test_krawtchouk_factor_at_zero_degree(self):
        # i_p = 0 makes the p-th factor exactly 1
        p = TDParameters(Shape((2, 2)), 0, 0, 1, 1, F(1, 3), F(1, 5), (F(1, 7), F(3, 11)))
        assert overlap_limit_kind(p, "krawtchouk", (0, 0), (2, 1)) == 1

    def test_krawtchouk_collapsed_form(self):
        # Chu-Vandermonde collapses each factor to (x_p - ell_p)_{i_p} / (1)_{i_p}
        p = TDParameters(Shape((3, 2)), 0, 0, 1, 1, F(1, 3), F(1, 5), (F(1, 7), F(3, 11)))
        for i in enumerate_box(p.shape):
            for x in enumerate_box(p.shape):
                closed = F(1)
                for q in range(p.N):
                    closed *= pochhammer(x[q] - p.ell[q], i[q]) / pochhammer(F(1), i[q])
                assert overlap_limit_kind(p, "krawtchouk", i, x) == closed

    def test_single_frozen_value(self):
        p = TDParameters(Shape((2,)), 0, 0, 1, 1, F(1, 3), F(1, 5), (F(3, 2),))
        assert overlap_limit_kind(p, "krawtchouk", (1,), (1,)) == -1

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            overlap_limit_kind(_params_2d(), "racah", (0, 0), (0, 0))


class TestRacahFactorSpec:
    def test_degree_invariants(self):
        with pytest.raises(ValueError):
            RacahFactorSpec(i=3, x=0, a1=1, a2=1, b1=1, b2=1, ell=2)
        with pytest.raises(ValueError):
            RacahFactorSpec(i=0, x=-1, a1=1, a2=1, b1=1, b2=1, ell=2)

    def test_zero_numerator_ends_series(self):
        # a1 = 0 kills every term past k = 0
        spec = RacahFactorSpec(i=2, x=2, a1=F(0), a2=F(5), b1=F(1), b2=F(1), ell=3)
        assert [k for k, _ in spec.series()] == [0]

    def test_zero_denominator_raises(self):
        spec = RacahFactorSpec(i=2, x=2, a1=F(5), a2=F(7), b1=F(-1), b2=F(1), ell=3)
        with pytest.raises(ZeroDenominatorPochhammer) as exc:
            list(spec.series())
        assert exc.value.k == 2

    def test_unit_value_collapse(self):
        # i = 0 leaves only the k = 0 term: value is the prefactor (b2)_x
        spec = RacahFactorSpec(i=0, x=2, a1=F(5), a2=F(7), b1=F(2), b2=F(3), ell=3)
        assert spec.value_at_unit() == pochhammer(F(3), 2)


class TestShiftedFunctional:
    def test_identity_table(self):
        f = ShiftedFunctional.identity(3)
        assert f.table == {(0, 0, 0): F(1)}
        assert f.total() == 1

    def test_weights_merge(self):
        f = ShiftedFunctional(2)
        f.add((1, 0), F(2))
        f.add((1, 0), F(3))
        f.add((0, 1), F(-5))
        assert f.table[(1, 0)] == 5
        assert f.total() == 0


class TestErrors:
    def test_invalid_parameters(self):
        bad = TDParameters(Shape((1,)), 0, 0, 0, 1, 0, 0, (1,))
        with pytest.raises(InvalidParameters):
            overlap_T(bad, (0,), (0,))
        with pytest.raises(InvalidParameters):
            overlap_limit_kind(bad, "hahn", (0,), (0,))

    def test_out_of_box_points(self):
        p = _params_2d()
        with pytest.raises(IndexOutOfRange):
            overlap_T(p, (2, 0), (0, 0))
        with pytest.raises(IndexOutOfRange):
            overlap_U(p, (0, 0), (0, 2))

    def test_unknown_method(self):
        p = _params_2d()
        with pytest.raises(ValueError):
            overlap_T(p, (0, 0), (0, 0), "linear_solve")
        with pytest.raises(ValueError):
            overlap_U(p, (0, 0), (0, 0), "matrix_product")
        with pytest.raises(ValueError):
            overlap_table(p, "V", "direct_sum")
