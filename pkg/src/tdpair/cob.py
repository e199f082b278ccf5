"""Change-of-basis coefficients between the split basis and the eigenbases.

Four families, each a product of one global Pochhammer denominator and one
binomial-times-Pochhammer factor per coordinate:

  C[n,x]     expansion of the A-eigenvector V(x) over the split basis,
             supported on n >= x pointwise
  Cbar[x,n]  the inverse expansion, supported on x >= n
  D[n,i]     expansion of the A*-eigenvector V_i, supported on n <= i
  Dbar[i,n]  its inverse, supported on i <= n

The matrices they fill satisfy, over the graded basis order,

  M_C M_Cbar = I            M_D M_Dbar = I
  A M_C  = M_C diag(theta_|x|)      A* M_D = M_D diag(theta*_|i|)

and D is the mirror of C: D[n,i] = C[ell-n, ell-i] with omega replaced by
-omega* - 2|ell|.

`block_tridiagonal_form` expresses the opposite operator in an eigenbasis
two independent ways (conjugation, and an explicit five-term block formula)
and insists they agree entrywise with zero far blocks.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Sequence

from .exactfield import (
    FieldElement,
    ZeroDenominatorPochhammer,
    binomial,
    is_zero,
    pochhammer,
)
from .multiindex import (
    IndexOutOfRange,
    MultiIndex,
    Shape,
    add,
    enumerate_box,
    in_box,
    partial_sum,
    sub,
    unit,
)
from .tdcore import (
    ExactMatrix,
    InvalidParameters,
    TDParameters,
    _assemble_operator,
    eigenvalue,
    validate_parameters,
    xi,
)

__all__ = [
    "COEFFICIENT_KINDS",
    "StructureViolation",
    "cob_coefficient",
    "coefficient_matrix",
    "eigenbasis_matrix",
    "block_tridiagonal_form",
]

COEFFICIENT_KINDS = ("C", "Cbar", "D", "Dbar")


class StructureViolation(ArithmeticError):
    """Two routes to the same block matrix produced different entries,
    or an entry appeared outside the tridiagonal band of levels."""

    def __init__(self, row, col, lhs, rhs, detail: str = ""):
        self.row = row
        self.col = col
        self.lhs = lhs
        self.rhs = rhs
        msg = f"entry [{tuple(row)}, {tuple(col)}]: {lhs} != {rhs}"
        if detail:
            msg = f"{detail}: {msg}"
        super().__init__(msg)


def _inv_poch(base: FieldElement, k: int, detail: str) -> FieldElement:
    v = pochhammer(base, k)
    if is_zero(v):
        raise ZeroDenominatorPochhammer(k, detail)
    return v


def _weight(n: Sequence[int]) -> int:
    return sum(n)


def cob_coefficient(
    params: TDParameters, kind: str, first: Sequence[int], second: Sequence[int]
) -> FieldElement:
    """One coefficient, indexed in subscript order (row index first).

    Out-of-support pairs give an exact zero.  Parameters are taken as
    already validated; on sets violating the constraints the global
    denominator can vanish, raising ZeroDenominatorPochhammer.
    """
    shape = params.shape
    if not in_box(first, shape):
        raise IndexOutOfRange(f"index {tuple(first)} outside the box of {shape!r}")
    if not in_box(second, shape):
        raise IndexOutOfRange(f"index {tuple(second)} outside the box of {shape!r}")
    if kind == "C":
        return _coeff_C(params, first, second)
    if kind == "Cbar":
        return _coeff_Cbar(params, first, second)
    if kind == "D":
        return _coeff_D(params, first, second)
    if kind == "Dbar":
        return _coeff_Dbar(params, first, second)
    raise ValueError(f"unknown coefficient kind {kind!r}; expected one of {COEFFICIENT_KINDS}")


def _coeff_C(params: TDParameters, n, x) -> FieldElement:
    ell, N, om = params.ell, params.N, params.omega
    tot = Fraction(1)
    for p in range(1, N + 1):
        b = binomial(n[p - 1], x[p - 1])
        if b == 0:
            return Fraction(0)
        base = (
            partial_sum(n, 1, p - 1)
            + partial_sum(x, 1, p)
            + partial_sum(ell, p, N)
            + params.a[p - 1]
            + om
            + 1
        )
        tot *= b * pochhammer(base, n[p - 1] - x[p - 1])
    d = _weight(n) - _weight(x)
    tot *= Fraction((-1) ** d)
    return tot / _inv_poch(2 * _weight(x) + om + 1, d, "C global factor")


def _coeff_Cbar(params: TDParameters, x, n) -> FieldElement:
    ell, N, om = params.ell, params.N, params.omega
    tot = Fraction(1)
    for p in range(1, N + 1):
        b = binomial(x[p - 1], n[p - 1])
        if b == 0:
            return Fraction(0)
        base = (
            partial_sum(n, 1, p)
            + partial_sum(x, 1, p - 1)
            + partial_sum(ell, p, N)
            + params.a[p - 1]
            + om
            + 1
        )
        tot *= b * pochhammer(base, x[p - 1] - n[p - 1])
    d = _weight(x) - _weight(n)
    return tot / _inv_poch(_weight(n) + _weight(x) + om, d, "Cbar global factor")


def _coeff_D(params: TDParameters, n, i) -> FieldElement:
    ell, N, oms = params.ell, params.N, params.omega_star
    tot = Fraction(1)
    for p in range(1, N + 1):
        b = binomial(ell[p - 1] - n[p - 1], ell[p - 1] - i[p - 1])
        if b == 0:
            return Fraction(0)
        base = (
            partial_sum(i, 1, p - 1)
            + partial_sum(n, 1, p)
            + partial_sum(ell, p + 1, N)
            - params.a[p - 1]
            + oms
        )
        tot *= b * pochhammer(base, i[p - 1] - n[p - 1])
    d = _weight(i) - _weight(n)
    tot *= Fraction((-1) ** d)
    return tot / _inv_poch(_weight(i) + _weight(n) + oms, d, "D global factor")


def _coeff_Dbar(params: TDParameters, i, n) -> FieldElement:
    ell, N, oms = params.ell, params.N, params.omega_star
    tot = Fraction(1)
    for p in range(1, N + 1):
        b = binomial(ell[p - 1] - i[p - 1], ell[p - 1] - n[p - 1])
        if b == 0:
            return Fraction(0)
        base = (
            partial_sum(n, 1, p - 1)
            + partial_sum(i, 1, p)
            + partial_sum(ell, p + 1, N)
            - params.a[p - 1]
            + oms
        )
        tot *= b * pochhammer(base, n[p - 1] - i[p - 1])
    d = _weight(n) - _weight(i)
    return tot / _inv_poch(2 * _weight(i) + oms + 1, d, "Dbar global factor")


# which coefficient dominates which: (kind) -> row >= col pointwise?
_SUPPORT_ROW_DOMINATES = {"C": True, "Cbar": True, "D": False, "Dbar": False}


def coefficient_matrix(params: TDParameters, kind: str) -> ExactMatrix:
    """The full table of one family as a matrix over the graded basis,
    oriented so entry [first, second] carries subscripts (first, second)."""
    if kind not in COEFFICIENT_KINDS:
        raise ValueError(f"unknown coefficient kind {kind!r}; expected one of {COEFFICIENT_KINDS}")
    shape = params.shape
    basis = enumerate_box(shape)
    m = ExactMatrix(basis)
    # iterate only the dominance sub-box of each column
    for col in basis:
        c = m.pos[col]
        if _SUPPORT_ROW_DOMINATES[kind]:
            ranges = [range(col[p], shape.ell[p] + 1) for p in range(shape.N)]
        else:
            ranges = [range(0, col[p] + 1) for p in range(shape.N)]
        for row in product(*ranges):
            v = cob_coefficient(params, kind, row, col)
            if not is_zero(v):
                m.entries[(m.pos[MultiIndex(row)], c)] = v
    return m


EIGENBASIS_NAMES = ("A_basis", "Astar_basis")


def eigenbasis_matrix(params: TDParameters, which: str) -> ExactMatrix:
    """Column matrix of an eigenbasis over the split basis.

    "A_basis" gives M_C (column x is the A-eigenvector of eigenvalue
    theta_|x|), "Astar_basis" gives M_D.  Parameters are validated first.
    """
    if which not in EIGENBASIS_NAMES:
        raise ValueError(f"unknown eigenbasis {which!r}; expected one of {EIGENBASIS_NAMES}")
    report = validate_parameters(params)
    if not report.passed:
        raise InvalidParameters(report)
    return coefficient_matrix(params, "C" if which == "A_basis" else "D")


BLOCK_FORMS = ("Astar_in_Vx", "A_in_Vi")


def block_tridiagonal_form(params: TDParameters, which: str) -> ExactMatrix:
    """The opposite operator written in an eigenbasis, computed two ways.

    "Astar_in_Vx" is A* over the V(x) basis; "A_in_Vi" is A over the V_i
    basis.  The conjugated matrix and the explicit block formula must agree
    entrywise, and every entry linking levels |row| and |col| with
    ||row| - |col|| >= 2 must vanish; any discrepancy raises
    StructureViolation.
    """
    if which not in BLOCK_FORMS:
        raise ValueError(f"unknown block form {which!r}; expected one of {BLOCK_FORMS}")
    report = validate_parameters(params)
    if not report.passed:
        raise InvalidParameters(report)
    if which == "Astar_in_Vx":
        fwd = coefficient_matrix(params, "C")
        inv = coefficient_matrix(params, "Cbar")
        op = _assemble_operator(params, "Astar")
        explicit = _explicit_star_blocks(params)
    else:
        fwd = coefficient_matrix(params, "D")
        inv = coefficient_matrix(params, "Dbar")
        op = _assemble_operator(params, "A")
        explicit = _explicit_plain_blocks(params)
    conj = inv @ (op @ fwd)
    diff = conj.first_difference(explicit)
    if diff is not None:
        raise StructureViolation(*diff, detail=f"{which}: conjugation vs block formula")
    for (r, c), v in conj.entries.items():
        if abs(conj.basis[r].weight - conj.basis[c].weight) >= 2 and not is_zero(v):
            raise StructureViolation(
                conj.basis[r], conj.basis[c], v, Fraction(0), detail=f"{which}: far block"
            )
    return conj


def _explicit_star_blocks(params: TDParameters) -> ExactMatrix:
    """A* on the V(x) basis from the five-term block formula."""
    shape = params.shape
    N = shape.N
    basis = enumerate_box(shape)
    m = ExactMatrix(basis)

    def put(row, col, v):
        if is_zero(v):
            return
        key = (m.pos[MultiIndex(row)], m.pos[col])
        m.entries[key] = m.entries.get(key, Fraction(0)) + v
        if m.entries[key] == 0:
            del m.entries[key]

    def ths(j):
        return eigenvalue(params, j, starred=True)

    cC = lambda n, x: cob_coefficient(params, "C", n, x)
    cCb = lambda x, n: cob_coefficient(params, "Cbar", x, n)

    for x in basis:
        w = x.weight
        for p in range(1, N + 1):
            y = sub(x, unit(p, N))
            if in_box(y, shape):
                put(y, x, xi(params, y, p, starred=True))
        for p in range(1, N + 1):
            y = add(x, unit(p, N))
            if in_box(y, shape):
                put(y, x, ths(w) * cCb(y, x) + ths(w + 1) * cC(y, x))
        put(x, x, ths(w))
        for p in range(1, N + 1):
            for q in range(1, N + 1):
                y = sub(add(x, unit(p, N)), unit(q, N))
                if not in_box(y, shape):
                    continue
                xmq = sub(x, unit(q, N))
                if in_box(xmq, shape):
                    put(y, x, xi(params, xmq, q, starred=True) * cCb(y, xmq))
                xpp = add(x, unit(p, N))
                if in_box(xpp, shape):
                    put(y, x, xi(params, y, q, starred=True) * cC(xpp, x))
        for p in range(1, N + 1):
            for q in range(1, N + 1):
                for r in range(q, N + 1):
                    y = sub(add(add(x, unit(q, N)), unit(r, N)), unit(p, N))
                    if not in_box(y, shape):
                        continue
                    top = add(add(x, unit(q, N)), unit(r, N))
                    for n in product(*[range(x[s], top[s] + 1) for s in range(N)]):
                        nm = sub(n, unit(p, N))
                        if not (in_box(n, shape) and in_box(nm, shape)):
                            continue
                        put(y, x, xi(params, nm, p, starred=True) * cC(n, x) * cCb(y, nm))
    return m


def _explicit_plain_blocks(params: TDParameters) -> ExactMatrix:
    """A on the V_i basis from the five-term block formula."""
    shape = params.shape
    N = shape.N
    basis = enumerate_box(shape)
    m = ExactMatrix(basis)

    def put(row, col, v):
        if is_zero(v):
            return
        key = (m.pos[MultiIndex(row)], m.pos[col])
        m.entries[key] = m.entries.get(key, Fraction(0)) + v
        if m.entries[key] == 0:
            del m.entries[key]

    def th(j):
        return eigenvalue(params, j)

    def cD(n, i):
        if not in_box(n, shape):
            return Fraction(0)
        return cob_coefficient(params, "D", n, i)

    cDb = lambda i, n: cob_coefficient(params, "Dbar", i, n)

    for i in basis:
        w = i.weight
        for p in range(1, N + 1):
            j = add(i, unit(p, N))
            if in_box(j, shape):
                put(j, i, xi(params, j, p))
        for p in range(1, N + 1):
            j = sub(i, unit(p, N))
            if in_box(j, shape):
                put(j, i, th(w) * cDb(j, i) + th(w - 1) * cD(j, i))
        put(i, i, th(w))
        for p in range(1, N + 1):
            for q in range(1, N + 1):
                j = add(sub(i, unit(p, N)), unit(q, N))
                if not in_box(j, shape):
                    continue
                ipq = add(i, unit(q, N))
                if in_box(ipq, shape):
                    put(j, i, xi(params, ipq, q) * cDb(j, ipq))
                put(j, i, xi(params, j, q) * cD(sub(i, unit(p, N)), i))
        for p in range(1, N + 1):
            for q in range(1, N + 1):
                for r in range(q, N + 1):
                    j = add(sub(sub(i, unit(q, N)), unit(r, N)), unit(p, N))
                    if not in_box(j, shape):
                        continue
                    bot = sub(sub(i, unit(q, N)), unit(r, N))
                    for n in product(*[range(max(bot[s], 0), i[s] + 1) for s in range(N)]):
                        npp = add(n, unit(p, N))
                        if not (in_box(n, shape) and in_box(npp, shape)):
                            continue
                        put(j, i, xi(params, npp, p) * cD(n, i) * cDb(j, npp))
    return m
