"""Operator assembly, parameter validation, and exact matrix algebra."""

from fractions import Fraction

import pytest

from tdpair.exactfield import rational
from tdpair.multiindex import IndexOutOfRange, MultiIndex, Shape, enumerate_box
from tdpair.tdcore import (
    ExactMatrix,
    InvalidParameters,
    StringSet,
    TDParameters,
    _assemble_operator,
    build_operator,
    eigenvalue,
    parameters_from_json_obj,
    parameters_to_json_obj,
    strings_general_position,
    substituted_for_involution,
    validate_parameters,
    xi,
)

F = Fraction


def _params_1d():
    # smallest valid instance: single coordinate, ell = (1)
    return TDParameters(
        shape=Shape((1,)),
        theta0=0,
        theta0_star=0,
        h=1,
        h_star=1,
        omega=0,
        omega_star=0,
        a=(1,),
    )


def _params_2d():
    # generic two-coordinate instance; all constraint offsets non-integer
    return TDParameters(
        shape=Shape((1, 1)),
        theta0=F(1, 2),
        theta0_star=F(-1, 3),
        h=2,
        h_star=3,
        omega=F(1, 3),
        omega_star=F(1, 5),
        a=(F(1, 7), F(3, 11)),
    )


class TestEigenvalues:
    def test_plain_sequence(self):
        p = _params_2d()
        assert [eigenvalue(p, j) for j in range(3)] == [F(1, 2), F(19, 6), F(59, 6)]

    def test_starred_sequence(self):
        p = _params_2d()
        got = [eigenvalue(p, j, starred=True) for j in range(3)]
        assert got == [F(-1, 3), F(49, 15), F(193, 15)]

    def test_out_of_range_level(self):
        p = _params_2d()
        with pytest.raises(IndexOutOfRange):
            eigenvalue(p, -1)
        with pytest.raises(IndexOutOfRange):
            eigenvalue(p, 3)

    def test_distinct_on_valid_instance(self):
        p = _params_2d()
        vals = [eigenvalue(p, j) for j in range(p.diameter + 1)]
        assert len(set(vals)) == len(vals)


class TestXi:
    def test_single_coordinate_value(self):
        # h (0 + 1 + 1 + 1 + 0) * 1 = 3
        assert xi(_params_1d(), (1,), 1) == 3

    def test_two_coordinate_values(self):
        p = _params_2d()
        assert xi(p, (1, 0), 1) == F(146, 21)
        assert xi(p, (1, 1), 2) == F(304, 33)

    def test_starred_values(self):
        p = _params_2d()
        assert xi(p, (0, 1), 1, starred=True) == F(-111, 35)
        assert xi(p, (0, 0), 2, starred=True) == F(12, 55)

    def test_starred_vanishes_at_ceiling(self):
        # the factor (n_p - ell_p) kills the coefficient at n_p = ell_p
        p = _params_2d()
        assert xi(p, (1, 0), 1, starred=True) == 0

    def test_plain_vanishes_at_floor(self):
        assert xi(_params_2d(), (0, 1), 1) == 0

    def test_bad_coordinate(self):
        with pytest.raises(IndexOutOfRange):
            xi(_params_2d(), (0, 0), 3)
        with pytest.raises(IndexOutOfRange):
            xi(_params_2d(), (0, 0), 0)

    def test_out_of_box_index(self):
        with pytest.raises(IndexOutOfRange):
            xi(_params_2d(), (2, 0), 1)


class TestOperatorAssembly:
    def test_single_coordinate_columns(self):
        p = _params_1d()
        A = build_operator(p, "A")
        As = build_operator(p, "Astar")
        v0, v1 = MultiIndex((0,)), MultiIndex((1,))
        assert A.column(v0) == {v1: F(3)}
        assert A.column(v1) == {v1: F(1)}
        assert As.column(v0) == {}
        assert As.column(v1) == {v0: F(1), v1: F(1)}

    def test_two_coordinate_raising_columns(self):
        A = build_operator(_params_2d(), "A")
        n00, n01, n10, n11 = (MultiIndex(v) for v in ((0, 0), (0, 1), (1, 0), (1, 1)))
        assert A.column(n00) == {n00: F(1, 2), n01: F(172, 33), n10: F(146, 21)}
        assert A.column(n01) == {n01: F(19, 6), n11: F(146, 21)}
        assert A.column(n10) == {n10: F(19, 6), n11: F(304, 33)}
        assert A.column(n11) == {n11: F(59, 6)}

    def test_two_coordinate_lowering_columns(self):
        As = build_operator(_params_2d(), "Astar")
        n00, n01, n10, n11 = (MultiIndex(v) for v in ((0, 0), (0, 1), (1, 0), (1, 1)))
        assert As.column(n00) == {n00: F(-1, 3)}
        assert As.column(n01) == {n00: F(12, 55), n01: F(49, 15)}
        assert As.column(n10) == {n00: F(-111, 35), n10: F(49, 15)}
        assert As.column(n11) == {n01: F(-111, 35), n10: F(-318, 55), n11: F(193, 15)}

    def test_split_parts(self):
        p = _params_2d()
        A = build_operator(p, "A")
        As = build_operator(p, "Astar")
        R = build_operator(p, "R")
        L = build_operator(p, "L")
        assert R == A.off_diagonal_part()
        assert L == As.off_diagonal_part()
        assert A == A.diagonal_part() + R
        assert As == As.diagonal_part() + L

    def test_antidiagonal_involution(self):
        p = _params_2d()
        S = build_operator(p, "S")
        basis = enumerate_box(p.shape)
        assert S @ S == ExactMatrix.identity(basis)
        n01, n10 = MultiIndex((0, 1)), MultiIndex((1, 0))
        assert S.column(n01) == {n10: F(1)}

    def test_conjugation_by_involution(self):
        # S A S matches the lowering assembly at substituted parameters,
        # and S A* S the raising assembly at the mirror substitution
        p = _params_2d()
        A = build_operator(p, "A")
        As = build_operator(p, "Astar")
        S = build_operator(p, "S")
        assert S @ A @ S == _assemble_operator(substituted_for_involution(p, starred=False), "Astar")
        assert S @ As @ S == _assemble_operator(substituted_for_involution(p, starred=True), "A")

    def test_unknown_operator_name(self):
        with pytest.raises(ValueError):
            build_operator(_params_2d(), "B")

    def test_invalid_parameters_refused(self):
        bad = TDParameters(
            shape=Shape((1,)),
            theta0=0,
            theta0_star=0,
            h=0,
            h_star=1,
            omega=0,
            omega_star=0,
            a=(1,),
        )
        with pytest.raises(InvalidParameters) as exc:
            build_operator(bad, "A")
        assert exc.value.report.result("cond1").passed is False


class TestValidation:
    def test_valid_instance(self):
        report = validate_parameters(_params_2d())
        assert report.passed
        assert [r.check for r in report.results] == ["cond1", "cond2", "cond3"]

    def test_zero_step_fails_first_clause(self):
        p = TDParameters(Shape((2,)), 0, 0, 0, 1, 0, 0, (1,))
        r = validate_parameters(p).result("cond1")
        assert r.passed is False
        assert any("h = 0" in w for w in r.witness)

    def test_omega_band_fails_first_clause(self):
        # ell = (1): forbidden band for omega is {-1}
        p = TDParameters(Shape((1,)), 0, 0, 1, 1, -1, 0, (1,))
        r = validate_parameters(p).result("cond1")
        assert r.passed is False

    def test_omega_band_edges_allowed(self):
        p = TDParameters(Shape((1,)), 0, 0, 1, 1, -2, 0, (2,))
        assert validate_parameters(p).result("cond1").passed

    def test_anchor_band_fails_second_clause(self):
        # a_1 - |ell| - omega_star = 1 - 2 - 0 = -1 lands in {-1}
        p = TDParameters(Shape((1, 1)), 0, 0, 1, 1, 0, 0, (1, 5))
        r = validate_parameters(p).result("cond2")
        assert r.passed is False
        assert any("a_1" in w for w in r.witness)

    def test_adjacent_strings_fail_third_clause(self):
        # S+(1,2) = {3} and S+(1,3) = {4} merge into a longer string
        p = TDParameters(Shape((1, 1)), 0, 0, 1, 1, 0, 0, (2, 3))
        report = validate_parameters(p)
        assert report.result("cond2").passed
        r = report.result("cond3")
        assert r.passed is False
        assert len(r.witness) == 2  # positive pair and its mirror

    def test_report_shape(self):
        report = validate_parameters(_params_2d())
        obj = report.to_json_obj()
        assert obj["pass"] is True
        assert [c["check"] for c in obj["checks"]] == ["cond1", "cond2", "cond3"]


class TestStringsGeneralPosition:
    def _p(self, omega=0, omega_star=0):
        return TDParameters(Shape((1,)), 0, 0, 1, 1, omega, omega_star, (1,))

    def test_opposite_strings_with_gap(self):
        # {1,2} against {-2,-1}: union has a hole at 0
        s1 = StringSet(sign=1, length=2, anchor=0)
        s2 = StringSet(sign=-1, length=2, anchor=0)
        assert strings_general_position(s1, s2, self._p())

    def test_adjacent_singletons(self):
        # {1} and {2} form the string {1,2}
        s1 = StringSet(sign=1, length=1, anchor=0)
        s2 = StringSet(sign=1, length=1, anchor=1)
        assert not strings_general_position(s1, s2, self._p())

    def test_coincident_singletons(self):
        # {1} and -({-2}+1) = {1}: containment
        s1 = StringSet(sign=1, length=1, anchor=0)
        s2 = StringSet(sign=-1, length=1, anchor=-2)
        assert strings_general_position(s1, s2, self._p())

    def test_non_integer_offset(self):
        # a gap that is not an integer can never close a string
        s1 = StringSet(sign=1, length=3, anchor=0)
        s2 = StringSet(sign=1, length=3, anchor=F(1, 2))
        assert strings_general_position(s1, s2, self._p())

    def test_proper_containment(self):
        s1 = StringSet(sign=1, length=4, anchor=0)
        s2 = StringSet(sign=1, length=2, anchor=1)
        assert strings_general_position(s1, s2, self._p())

    def test_interleaving_rejected(self):
        # {2,3} just after {1,2} overlaps but neither contains the other
        s1 = StringSet(sign=1, length=2, anchor=0)
        s2 = StringSet(sign=1, length=2, anchor=1)
        assert not strings_general_position(s1, s2, self._p())

    def test_sign_validation(self):
        with pytest.raises(ValueError):
            StringSet(sign=0, length=1, anchor=0)
        with pytest.raises(ValueError):
            StringSet(sign=1, length=0, anchor=0)


class TestExactMatrix:
    def _basis(self):
        return enumerate_box(Shape((1, 1)))

    def test_identity_is_neutral(self):
        basis = self._basis()
        I = ExactMatrix.identity(basis)
        A = build_operator(_params_2d(), "A")
        assert I @ A == A
        assert A @ I == A

    def test_zero_entries_dropped(self):
        basis = self._basis()
        m = ExactMatrix(basis, {(0, 0): F(0), (1, 2): F(5)})
        assert (0, 0) not in m.entries
        assert m.item(1, 2) == 5

    def test_product_against_hand_computation(self):
        basis = enumerate_box(Shape((1,)))
        a = ExactMatrix(basis, {(0, 0): F(1), (0, 1): F(2), (1, 1): F(3)})
        b = ExactMatrix(basis, {(0, 0): F(5), (1, 0): F(7), (1, 1): F(11)})
        assert a @ b == ExactMatrix(
            basis, {(0, 0): F(19), (0, 1): F(22), (1, 0): F(21), (1, 1): F(33)}
        )

    def test_transpose_reverses_products(self):
        p = _params_2d()
        A = build_operator(p, "A")
        As = build_operator(p, "Astar")
        assert (A @ As).transpose() == As.transpose() @ A.transpose()

    def test_commutator_antisymmetry(self):
        p = _params_2d()
        A = build_operator(p, "A")
        As = build_operator(p, "Astar")
        assert A.commutator(As) == -(As.commutator(A))
        assert A.commutator(A).is_zero()

    def test_scale(self):
        A = build_operator(_params_2d(), "A")
        assert A.scale(F(0)).is_zero()
        assert A.scale(F(2)) == A + A

    def test_mixed_bases_rejected(self):
        a = ExactMatrix.identity(enumerate_box(Shape((1,))))
        b = ExactMatrix.identity(enumerate_box(Shape((2,))))
        with pytest.raises(ValueError):
            a @ b

    def test_first_difference(self):
        basis = self._basis()
        a = ExactMatrix.identity(basis)
        b = ExactMatrix(basis, {(0, 0): F(1), (1, 1): F(2)})
        row, col, lhs, rhs = a.first_difference(b)
        assert (row, col) == (basis[1], basis[1])
        assert (lhs, rhs) == (F(1), F(2))
        assert a.first_difference(a) is None

    def test_solve_upper_triangular(self):
        basis = self._basis()
        u = ExactMatrix(
            basis,
            {(0, 0): F(1), (0, 1): F(2), (0, 3): F(-1), (1, 1): F(1), (2, 2): F(1), (2, 3): F(4), (3, 3): F(1)},
        )
        x = ExactMatrix(basis, {(0, 2): F(7), (1, 0): F(-2), (3, 3): F(5), (2, 2): F(1, 3)})
        assert u.solve_upper_triangular(u @ x) == x

    def test_solve_rejects_lower_entries(self):
        basis = enumerate_box(Shape((1,)))
        m = ExactMatrix(basis, {(0, 0): F(1), (1, 0): F(1), (1, 1): F(1)})
        with pytest.raises(ValueError):
            m.solve_upper_triangular(ExactMatrix.identity(basis))

    def test_json_and_csv_forms(self):
        basis = enumerate_box(Shape((1,)))
        m = ExactMatrix(basis, {(1, 0): F(3, 2)})
        obj = m.to_json_obj()
        assert obj["basis"] == ["[0]", "[1]"]
        assert obj["entries"] == [["[1]", "[0]", "3/2"]]
        rows = m.to_csv_rows()
        assert rows[0] == ["index", "[0]", "[1]"]
        assert rows[2] == ["[1]", "3/2", "0"]

    def test_unhashable(self):
        m = ExactMatrix.identity(enumerate_box(Shape((1,))))
        with pytest.raises(TypeError):
            hash(m)


class TestParameterSerialization:
    def test_round_trip(self):
        p = _params_2d()
        obj = parameters_to_json_obj(p)
        assert obj["ell"] == [1, 1]
        assert obj["h"] == "2"
        assert obj["a"] == ["1/7", "3/11"]
        assert parameters_from_json_obj(obj) == p

    def test_integer_fields_accepted(self):
        obj = {
            "ell": [2],
            "theta0": 0,
            "theta0_star": 0,
            "h": 1,
            "h_star": 1,
            "omega": "1/3",
            "omega_star": "1/5",
            "a": [1],
        }
        p = parameters_from_json_obj(obj)
        assert p.h == F(1)
        assert p.a == (F(1),)

    def test_missing_key(self):
        with pytest.raises(ValueError, match="missing keys"):
            parameters_from_json_obj({"ell": [1]})

    def test_wrong_anchor_count(self):
        with pytest.raises(ValueError, match="anchor"):
            TDParameters(Shape((1, 1)), 0, 0, 1, 1, 0, 0, (1,))

    def test_rational_strings(self):
        assert rational("-3/4") == F(-3, 4)
        with pytest.raises(ValueError):
            rational("3/0")
