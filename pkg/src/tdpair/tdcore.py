"""Parameter validation and the split-basis operators A, A*, S, R, L.

The pair acts on a vector space with basis {V^n} indexed by the box of a
Shape.  Eigenvalues are quadratic in the level:

    theta_j      = theta0  + h  j (j + omega)
    theta*_j     = theta0* + h* j (j + omega*)

and the off-diagonal data are the xi coefficients defined below.  A raises
the level by one, A* lowers it by one; terms that would leave the box are
dropped (the out-of-box index stands for the zero vector).

Validity of a parameter set means three constraint families hold:

  cond1   h and h* nonzero; omega, omega* outside {-2|ell|+1, ..., -1}
  cond2   for each p: none of a_p, a_p + omega - omega*,
          a_p - |ell| - omega*, a_p + |ell| + omega lies in {-ell_p, ..., -1}
  cond3   every pair of the 2N value strings S^+/-(ell_p, a_p) is in
          general position

These guarantee simple distinct spectra, never-vanishing off-diagonal
coefficients, and (together) irreducibility of the pair.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .exactfield import (
    FieldElement,
    as_integer,
    format_scalar,
    rational,
)
from .multiindex import (
    IndexOutOfRange,
    MultiIndex,
    Shape,
    add,
    enumerate_box,
    format_multiindex,
    in_box,
    partial_sum,
    sub,
    unit,
)
from .report import CheckResult, VerificationReport

__all__ = [
    "InvalidParameters",
    "TDParameters",
    "StringSet",
    "ExactMatrix",
    "eigenvalue",
    "xi",
    "validate_parameters",
    "strings_general_position",
    "build_operator",
    "parameters_from_json_obj",
    "parameters_to_json_obj",
]

OPERATOR_NAMES = ("A", "Astar", "S", "R", "L")


class InvalidParameters(ValueError):
    """Raised when construction is attempted with a failing parameter set."""

    def __init__(self, report: VerificationReport):
        self.report = report
        failed = ", ".join(r.check for r in report.failures())
        super().__init__(f"parameter constraints violated: {failed}")


def _coerce_scalar(v) -> FieldElement:
    if isinstance(v, bool):
        raise TypeError("bool is not a scalar parameter")
    if isinstance(v, int):
        return Fraction(v)
    return v


@dataclass(frozen=True)
class TDParameters:
    """The full parameter set of one pair.

    Scalars may be rationals or rational functions (the latter are used for
    the substitution limits); ints are coerced to Fraction.
    """

    shape: Shape
    theta0: FieldElement
    theta0_star: FieldElement
    h: FieldElement
    h_star: FieldElement
    omega: FieldElement
    omega_star: FieldElement
    a: tuple[FieldElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "theta0", _coerce_scalar(self.theta0))
        object.__setattr__(self, "theta0_star", _coerce_scalar(self.theta0_star))
        object.__setattr__(self, "h", _coerce_scalar(self.h))
        object.__setattr__(self, "h_star", _coerce_scalar(self.h_star))
        object.__setattr__(self, "omega", _coerce_scalar(self.omega))
        object.__setattr__(self, "omega_star", _coerce_scalar(self.omega_star))
        object.__setattr__(self, "a", tuple(_coerce_scalar(v) for v in self.a))
        if len(self.a) != self.shape.N:
            raise ValueError(
                f"expected {self.shape.N} anchor values a_p, got {len(self.a)}"
            )

    @property
    def N(self) -> int:
        return self.shape.N

    @property
    def ell(self) -> tuple[int, ...]:
        return self.shape.ell

    @property
    def diameter(self) -> int:
        return self.shape.diameter


_PARAM_KEYS = ("theta0", "theta0_star", "h", "h_star", "omega", "omega_star")


def parameters_from_json_obj(obj: dict) -> TDParameters:
    """Build parameters from the JSON document schema.

    Expected keys: "ell" (list of ints), "theta0", "theta0_star", "h",
    "h_star", "omega", "omega_star" (rational strings "p/q"), and "a"
    (list of rational strings).
    """
    if not isinstance(obj, dict):
        raise ValueError("parameter document must be a JSON object")
    missing = [k for k in ("ell", *_PARAM_KEYS, "a") if k not in obj]
    if missing:
        raise ValueError(f"parameter document missing keys: {', '.join(missing)}")
    shape = Shape(tuple(obj["ell"]))
    scalars = {}
    for key in _PARAM_KEYS:
        raw = obj[key]
        scalars[key] = rational(raw) if isinstance(raw, str) else Fraction(_expect_int(raw, key))
    a_raw = obj["a"]
    if not isinstance(a_raw, list):
        raise ValueError('"a" must be a list of rational strings')
    a = tuple(rational(v) if isinstance(v, str) else Fraction(_expect_int(v, "a")) for v in a_raw)
    return TDParameters(shape=shape, a=a, **scalars)


def _expect_int(v, key: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f'field "{key}" must be a rational string "p/q" or an integer')
    return v


def parameters_to_json_obj(params: TDParameters) -> dict:
    obj = {"ell": list(params.ell)}
    for key in _PARAM_KEYS:
        obj[key] = format_scalar(getattr(params, key))
    obj["a"] = [format_scalar(v) for v in params.a]
    return obj


# ---------------------------------------------------------------------------
# eigenvalues and off-diagonal coefficients


def eigenvalue(params: TDParameters, i: int, starred: bool = False) -> FieldElement:
    """theta_i, or theta*_i when starred; defined for 0 <= i <= |ell|."""
    if not isinstance(i, int) or not 0 <= i <= params.diameter:
        raise IndexOutOfRange(f"level {i} outside 0..{params.diameter}")
    if starred:
        return params.theta0_star + params.h_star * i * (i + params.omega_star)
    return params.theta0 + params.h * i * (i + params.omega)


def xi(params: TDParameters, n: Sequence[int], p: int, starred: bool = False) -> FieldElement:
    """The off-diagonal coefficient xi_{n,p} (or xi*_{n,p} when starred).

    xi_{n,p}  = h  (|n|_1^{p-1} + |n|_1^p + |ell|_p^N     + a_p + omega ) n_p
    xi*_{n,p} = h* (|n|_1^{p-1} + |n|_1^p + |ell|_{p+1}^N - a_p + omega*) (n_p - ell_p)
    """
    shape = params.shape
    if not 1 <= p <= shape.N:
        raise IndexOutOfRange(f"coordinate {p} outside 1..{shape.N}")
    if not in_box(n, shape):
        raise IndexOutOfRange(f"index {tuple(n)} outside the box of {shape!r}")
    ell = shape.ell
    head = partial_sum(n, 1, p - 1) + partial_sum(n, 1, p)
    if starred:
        factor = head + partial_sum(ell, p + 1, shape.N) - params.a[p - 1] + params.omega_star
        return params.h_star * factor * (n[p - 1] - ell[p - 1])
    factor = head + partial_sum(ell, p, shape.N) + params.a[p - 1] + params.omega
    return params.h * factor * n[p - 1]


# ---------------------------------------------------------------------------
# constraint validation


@dataclass(frozen=True)
class StringSet:
    """A value string: the set {sign * (anchor + k + (omega - omega*)/2)}
    for k = 1..length."""

    sign: int
    length: int
    anchor: FieldElement

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not isinstance(self.length, int) or self.length < 1:
            raise ValueError("length must be an integer >= 1")
        object.__setattr__(self, "anchor", _coerce_scalar(self.anchor))

    def elements(self, omega: FieldElement, omega_star: FieldElement) -> tuple:
        half = (_coerce_scalar(omega) - _coerce_scalar(omega_star)) * Fraction(1, 2)
        return tuple(self.sign * (self.anchor + k + half) for k in range(1, self.length + 1))


def _is_unit_string(values: list) -> bool:
    """Whether a set of distinct values is {c+1, ..., c+m} for some c.

    Values are comparable for consecutiveness only when their difference is
    an integer; any non-integer gap means the set is not a string.
    """
    if len(values) <= 1:
        return True
    base = values[0]
    offsets = []
    for v in values:
        d = as_integer(v - base)
        if d is None:
            return False
        offsets.append(d)
    return max(offsets) - min(offsets) + 1 == len(offsets)


def _dedupe(values: Iterable) -> list:
    out = []
    for v in values:
        if not any(v == w for w in out):
            out.append(v)
    return out


def strings_general_position(s1: StringSet, s2: StringSet, params: TDParameters) -> bool:
    """Whether two strings (built from the same omega, omega*) are in
    general position: one contains the other, or their union is not itself
    a string of consecutive unit-step values."""
    e1 = _dedupe(s1.elements(params.omega, params.omega_star))
    e2 = _dedupe(s2.elements(params.omega, params.omega_star))
    contains = lambda big, small: all(any(v == w for w in big) for v in small)
    if contains(e1, e2) or contains(e2, e1):
        return True
    return not _is_unit_string(_dedupe(e1 + e2))


def _in_band(v: FieldElement, lo: int, hi: int) -> bool:
    m = as_integer(v)
    return m is not None and lo <= m <= hi


def validate_parameters(params: TDParameters) -> VerificationReport:
    """Check the three constraint families; every violated clause is listed
    with its witness value.  Never raises: failures live in the report."""
    report = VerificationReport()
    ell = params.ell
    L = params.diameter
    N = params.N

    start = time.perf_counter()
    bad1 = []
    if params.h == 0:
        bad1.append("h = 0")
    if params.h_star == 0:
        bad1.append("h_star = 0")
    if L >= 1 and _in_band(params.omega, -2 * L + 1, -1):
        bad1.append(f"omega = {format_scalar(params.omega)} lies in {{-{2 * L - 1},...,-1}}")
    if L >= 1 and _in_band(params.omega_star, -2 * L + 1, -1):
        bad1.append(
            f"omega_star = {format_scalar(params.omega_star)} lies in {{-{2 * L - 1},...,-1}}"
        )
    report.add(
        CheckResult(
            check="cond1",
            paper_ref="nonzero quadratic steps; omega bands avoid eigenvalue collisions",
            passed=not bad1,
            witness=bad1 or None,
            millis=_ms(start),
        )
    )

    start = time.perf_counter()
    bad2 = []
    for p in range(1, N + 1):
        combos = {
            f"a_{p}": params.a[p - 1],
            f"a_{p} + omega - omega_star": params.a[p - 1] + params.omega - params.omega_star,
            f"a_{p} - |ell| - omega_star": params.a[p - 1] - L - params.omega_star,
            f"a_{p} + |ell| + omega": params.a[p - 1] + L + params.omega,
        }
        for label, value in combos.items():
            if _in_band(value, -ell[p - 1], -1):
                bad2.append(
                    f"{label} = {format_scalar(value)} lies in {{-{ell[p - 1]},...,-1}}"
                )
    report.add(
        CheckResult(
            check="cond2",
            paper_ref="anchor offsets keep every off-diagonal coefficient nonzero",
            passed=not bad2,
            witness=bad2 or None,
            millis=_ms(start),
        )
    )

    start = time.perf_counter()
    bad3 = []
    strings = [
        (sign, p, StringSet(sign=sign, length=ell[p - 1], anchor=params.a[p - 1]))
        for p in range(1, N + 1)
        for sign in (1, -1)
    ]
    for u in range(len(strings)):
        for v in range(u + 1, len(strings)):
            s1, s2 = strings[u][2], strings[v][2]
            if not strings_general_position(s1, s2, params):
                tag1 = f"S{'+' if strings[u][0] == 1 else '-'}(ell_{strings[u][1]}, a_{strings[u][1]})"
                tag2 = f"S{'+' if strings[v][0] == 1 else '-'}(ell_{strings[v][1]}, a_{strings[v][1]})"
                bad3.append(f"{tag1} and {tag2} are not in general position")
    report.add(
        CheckResult(
            check="cond3",
            paper_ref="value strings pairwise in general position (irreducibility)",
            passed=not bad3,
            witness=bad3 or None,
            millis=_ms(start),
        )
    )
    return report


def _ms(start: float) -> int:
    return int((time.perf_counter() - start) * 1000)


# ---------------------------------------------------------------------------
# exact matrices over the enumerated basis


class ExactMatrix:
    """A square matrix over an exact field, indexed by the box basis.

    Entries are stored sparsely, keyed by (row, col) positions in the
    graded enumeration order; an absent entry is zero.  Matrices are
    immutable by convention once constructed; all operations return new
    objects.  Equality is exact and entrywise.
    """

    __slots__ = ("basis", "pos", "entries")

    def __init__(self, basis: Sequence[MultiIndex], entries: Optional[dict] = None):
        self.basis = tuple(basis)
        self.pos = {m: k for k, m in enumerate(self.basis)}
        self.entries: dict[tuple[int, int], FieldElement] = {}
        if entries:
            for (r, c), v in entries.items():
                if v != 0:
                    self.entries[(r, c)] = v

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, basis: Sequence[MultiIndex]) -> "ExactMatrix":
        return cls(basis)

    @classmethod
    def identity(cls, basis: Sequence[MultiIndex]) -> "ExactMatrix":
        m = cls(basis)
        one = Fraction(1)
        for k in range(len(m.basis)):
            m.entries[(k, k)] = one
        return m

    @classmethod
    def diagonal(
        cls, basis: Sequence[MultiIndex], value_at: Callable[[MultiIndex], FieldElement]
    ) -> "ExactMatrix":
        m = cls(basis)
        for k, mi in enumerate(m.basis):
            v = value_at(mi)
            if v != 0:
                m.entries[(k, k)] = v
        return m

    @classmethod
    def from_function(
        cls,
        basis: Sequence[MultiIndex],
        value_at: Callable[[MultiIndex, MultiIndex], FieldElement],
    ) -> "ExactMatrix":
        """Dense assembly: value_at(row_index, col_index) for every pair."""
        m = cls(basis)
        for r, rm in enumerate(m.basis):
            for c, cm in enumerate(m.basis):
                v = value_at(rm, cm)
                if v != 0:
                    m.entries[(r, c)] = v
        return m

    # -- access -----------------------------------------------------------

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def entry(self, row: MultiIndex, col: MultiIndex) -> FieldElement:
        return self.entries.get((self.pos[row], self.pos[col]), Fraction(0))

    def item(self, r: int, c: int) -> FieldElement:
        return self.entries.get((r, c), Fraction(0))

    def column(self, col: MultiIndex) -> dict[MultiIndex, FieldElement]:
        c = self.pos[col]
        return {self.basis[r]: v for (r, cc), v in self.entries.items() if cc == c}

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.basis != other.basis:
            return False
        keys = set(self.entries) | set(other.entries)
        return all(self.item(*k) == other.item(*k) for k in keys)

    def __hash__(self):
        raise TypeError("ExactMatrix is not hashable")

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries.values())

    def first_difference(self, other: "ExactMatrix"):
        """(row index, col index, self value, other value) of the first
        differing entry in storage order, or None when equal."""
        keys = sorted(set(self.entries) | set(other.entries))
        for r, c in keys:
            a, b = self.item(r, c), other.item(r, c)
            if a != b:
                return (self.basis[r], self.basis[c], a, b)
        return None

    # -- arithmetic ---------------------------------------------------------

    def _check_same_basis(self, other: "ExactMatrix"):
        if self.basis != other.basis:
            raise ValueError("matrices over different bases")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_basis(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, Fraction(0)) + v
        return ExactMatrix(self.basis, out)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_basis(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, Fraction(0)) - v
        return ExactMatrix(self.basis, out)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.basis, {k: -v for k, v in self.entries.items()})

    def scale(self, s: FieldElement) -> "ExactMatrix":
        if s == 0:
            return ExactMatrix(self.basis)
        return ExactMatrix(self.basis, {k: s * v for k, v in self.entries.items()})

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_basis(other)
        by_row: dict[int, list] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict[tuple[int, int], FieldElement] = {}
        for (r, k), v in self.entries.items():
            row = by_row.get(k)
            if not row:
                continue
            for c, w in row:
                key = (r, c)
                cur = out.get(key)
                out[key] = v * w if cur is None else cur + v * w
        return ExactMatrix(self.basis, out)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.basis, {(c, r): v for (r, c), v in self.entries.items()})

    def commutator(self, other: "ExactMatrix") -> "ExactMatrix":
        return self @ other - other @ self

    def diagonal_part(self) -> "ExactMatrix":
        return ExactMatrix(
            self.basis, {k: v for k, v in self.entries.items() if k[0] == k[1]}
        )

    def off_diagonal_part(self) -> "ExactMatrix":
        return ExactMatrix(
            self.basis, {k: v for k, v in self.entries.items() if k[0] != k[1]}
        )

    def solve_upper_triangular(self, rhs: "ExactMatrix") -> "ExactMatrix":
        """Solve self X = rhs for X, with self upper triangular in storage
        order with nonzero diagonal.  Exact back-substitution."""
        self._check_same_basis(rhs)
        d = self.dimension
        rows: dict[int, list] = {}
        for (r, c), v in self.entries.items():
            if r > c:
                raise ValueError("matrix is not upper triangular in storage order")
            rows.setdefault(r, []).append((c, v))
        diag = [self.item(k, k) for k in range(d)]
        if any(v == 0 for v in diag):
            raise ZeroDivisionError("upper-triangular solve with zero diagonal entry")
        out: dict[tuple[int, int], FieldElement] = {}
        rhs_cols: dict[int, dict[int, FieldElement]] = {}
        for (r, c), v in rhs.entries.items():
            rhs_cols.setdefault(c, {})[r] = v
        for c in range(d):
            b = rhs_cols.get(c, {})
            xcol: dict[int, FieldElement] = {}
            for r in range(d - 1, -1, -1):
                acc = b.get(r, Fraction(0))
                for cc, v in rows.get(r, ()):  # entries at and right of the diagonal
                    if cc > r and cc in xcol:
                        acc = acc - v * xcol[cc]
                if acc != 0:
                    xcol[r] = acc / diag[r]
            for r, v in xcol.items():
                out[(r, c)] = v
        return ExactMatrix(self.basis, out)

    # -- serialization ------------------------------------------------------

    def to_json_obj(self) -> dict:
        triplets = [
            [format_multiindex(self.basis[r]), format_multiindex(self.basis[c]), format_scalar(v)]
            for (r, c), v in sorted(self.entries.items())
        ]
        return {
            "basis": [format_multiindex(m) for m in self.basis],
            "entries": triplets,
        }

    def to_csv_rows(self) -> list[list[str]]:
        header = ["index"] + [format_multiindex(m) for m in self.basis]
        out = [header]
        for r, rm in enumerate(self.basis):
            out.append(
                [format_multiindex(rm)]
                + [format_scalar(self.item(r, c)) for c in range(self.dimension)]
            )
        return out

    def __repr__(self):
        return f"<ExactMatrix {self.dimension}x{self.dimension}, {len(self.entries)} stored>"


# ---------------------------------------------------------------------------
# operator construction


def _assemble_operator(params: TDParameters, which: str) -> ExactMatrix:
    """Build the operator matrix without re-validating the parameters."""
    shape = params.shape
    basis = enumerate_box(shape)
    m = ExactMatrix(basis)
    N = shape.N
    if which == "S":
        for n in basis:
            mirrored = MultiIndex(sub(shape.ell, n))
            m.entries[(m.pos[mirrored], m.pos[n])] = Fraction(1)
        return m
    diagonal = which in ("A", "Astar")
    starred = which in ("Astar", "L")
    for n in basis:
        c = m.pos[n]
        if diagonal:
            v = eigenvalue(params, n.weight, starred=starred)
            if v != 0:
                m.entries[(c, c)] = v
        for p in range(1, N + 1):
            target = sub(n, unit(p, N)) if starred else add(n, unit(p, N))
            if not in_box(target, shape):
                continue
            coeff = xi(params, target, p, starred=starred)
            if coeff != 0:
                m.entries[(m.pos[MultiIndex(target)], c)] = coeff
    return m


def build_operator(params: TDParameters, which: str) -> ExactMatrix:
    """Matrix of A, A*, S, R, or L over the graded box basis.

    A  = diag(theta_|n|)  + R  (R raises the level by one)
    A* = diag(theta*_|n|) + L  (L lowers the level by one)
    S  maps V^n to V^(ell - n)

    Raises InvalidParameters when the constraint report fails.
    """
    if which not in OPERATOR_NAMES:
        raise ValueError(f"unknown operator {which!r}; expected one of {OPERATOR_NAMES}")
    report = validate_parameters(params)
    if not report.passed:
        raise InvalidParameters(report)
    return _assemble_operator(params, which)


def substituted_for_involution(params: TDParameters, starred: bool) -> TDParameters:
    """The parameter substitution realizing conjugation by S.

    With starred=False: parameters whose starred family reproduces S A S,
    i.e. theta0* -> theta0 + h |ell| (|ell| + omega), h* -> h,
    omega* -> -omega - 2|ell|.  With starred=True: the mirror substitution
    whose plain family reproduces S A* S.
    """
    L = params.diameter
    if starred:
        return replace(
            params,
            theta0=params.theta0_star + params.h_star * L * (L + params.omega_star),
            h=params.h_star,
            omega=-params.omega_star - 2 * L,
        )
    return replace(
        params,
        theta0_star=params.theta0 + params.h * L * (L + params.omega),
        h_star=params.h,
        omega_star=-params.omega - 2 * L,
    )
