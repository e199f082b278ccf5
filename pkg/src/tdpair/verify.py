"""One-shot exact verification suites over a parameter set.

Every algebraic identity the construction promises is phrased as a named
check returning a CheckResult with a reproducible witness on failure.
All comparisons are exact field equalities; there are no tolerances.

Check names, in canonical report order:

  constraints          the three parameter constraint families
  eigen                both eigenbasis matrices diagonalize their operator,
                       spectra pairwise distinct
  inverse              forward and inverse change-of-basis multiply to I
  td_relations         both cubic tridiagonal relations (beta exposed so a
                       mutated value visibly breaks them)
  r3l                  the triple commutator [R,[R,[R,L]]] collapses onto
                       R^2 times a level diagonal
  block_structure      conjugated operators match the explicit block
                       formulas with zero far blocks
  sas_conjugation      the antidiagonal involution swaps the operators up
                       to the parameter substitution
  overlap_consistency  every T route agrees; every U route agrees
  biorthogonality      sum_x T_i(x) U_j(x) = delta_ij
  racah_reduction      single-coordinate closed forms match (skipped for
                       N > 1)
  limits               the degenerate kinds equal t -> 0 limits of the
                       general kind under the spectrum substitutions
  irreducibility       words in {A, A*} span the full matrix algebra
                       (opt-in; reports certified or inconclusive)

A failing constraints check short-circuits everything that depends on a
valid parameter set; those checks are reported as skipped, not failed.
"""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .exactfield import (
    FieldElement,
    RationalFunction,
    as_integer,
    format_scalar,
    limit_at_zero,
    variable_t,
)
from .multiindex import MultiIndex, Shape, enumerate_box, format_multiindex
from .report import CheckResult, VerificationReport
from .cob import StructureViolation, block_tridiagonal_form, coefficient_matrix
from .overlap import (
    T_METHODS,
    U_METHODS,
    overlap_T,
    overlap_U,
    overlap_limit_kind,
    overlap_table,
    univariate_t_racah,
    univariate_u_balanced,
    univariate_u_racah_normalized,
)
from .tdcore import (
    ExactMatrix,
    TDParameters,
    _assemble_operator,
    eigenvalue,
    substituted_for_involution,
    validate_parameters,
)

__all__ = [
    "CHECK_NAMES",
    "DEFAULT_CHECKS",
    "SamplingExhausted",
    "run_suite",
    "random_valid_parameters",
]

CHECK_NAMES = (
    "constraints",
    "eigen",
    "inverse",
    "td_relations",
    "r3l",
    "block_structure",
    "sas_conjugation",
    "overlap_consistency",
    "biorthogonality",
    "racah_reduction",
    "limits",
    "irreducibility",
)

# irreducibility is opt-in: its cost grows much faster than the rest
DEFAULT_CHECKS = CHECK_NAMES[:-1]


class SamplingExhausted(RuntimeError):
    """The rejection sampler ran out of attempts; the bound is too tight
    for the shape, which says nothing about the mathematics."""


# ---------------------------------------------------------------------------
# witness helpers


def _entry_witness(diff) -> dict:
    row, col, lhs, rhs = diff
    return {
        "row": format_multiindex(row),
        "col": format_multiindex(col),
        "lhs": format_scalar(lhs),
        "rhs": format_scalar(rhs),
    }


def _matrices_equal(lhs: ExactMatrix, rhs: ExactMatrix, label: str) -> Optional[dict]:
    diff = lhs.first_difference(rhs)
    if diff is None:
        return None
    w = _entry_witness(diff)
    w["identity"] = label
    return w


# ---------------------------------------------------------------------------
# the individual checks; each takes a prebuilt context and returns
# (passed, witness)


class _Context:
    """Operators and coefficient matrices shared by the checks, built once."""

    def __init__(self, params: TDParameters):
        self.params = params
        self.basis = enumerate_box(params.shape)
        self.A = _assemble_operator(params, "A")
        self.As = _assemble_operator(params, "Astar")
        self.S = _assemble_operator(params, "S")
        self.R = self.A.off_diagonal_part()
        self.L = self.As.off_diagonal_part()
        self.MC = coefficient_matrix(params, "C")
        self.MCb = coefficient_matrix(params, "Cbar")
        self.MD = coefficient_matrix(params, "D")
        self.MDb = coefficient_matrix(params, "Dbar")


def _check_eigen(ctx: _Context):
    p = ctx.params
    for starred in (False, True):
        vals = [eigenvalue(p, j, starred=starred) for j in range(p.diameter + 1)]
        for u in range(len(vals)):
            for v in range(u + 1, len(vals)):
                if vals[u] == vals[v]:
                    name = "starred" if starred else "plain"
                    return False, {
                        "identity": f"{name} spectrum distinctness",
                        "levels": [u, v],
                        "value": format_scalar(vals[u]),
                    }
    dt = ExactMatrix.diagonal(ctx.basis, lambda m: eigenvalue(p, m.weight))
    dts = ExactMatrix.diagonal(ctx.basis, lambda m: eigenvalue(p, m.weight, starred=True))
    w = _matrices_equal(ctx.A @ ctx.MC, ctx.MC @ dt, "A on its eigenbasis")
    if w is None:
        w = _matrices_equal(ctx.As @ ctx.MD, ctx.MD @ dts, "A* on its eigenbasis")
    return w is None, w


def _check_inverse(ctx: _Context):
    I = ExactMatrix.identity(ctx.basis)
    w = _matrices_equal(ctx.MC @ ctx.MCb, I, "raising family inverse")
    if w is None:
        w = _matrices_equal(ctx.MD @ ctx.MDb, I, "lowering family inverse")
    return w is None, w


def _check_td_relations(ctx: _Context, beta: FieldElement):
    p = ctx.params
    A, As = ctx.A, ctx.As
    gamma, rho = 2 * p.h, p.h * (p.h * (p.omega**2 - 1) - 4 * p.theta0)
    gamma_s = 2 * p.h_star
    rho_s = p.h_star * (p.h_star * (p.omega_star**2 - 1) - 4 * p.theta0_star)
    P1 = (A @ A @ As) - (A @ As @ A).scale(beta) + (As @ A @ A)
    P1 = P1 - ((A @ As) + (As @ A)).scale(gamma) - As.scale(rho)
    w = _matrices_equal(
        A.commutator(P1), ExactMatrix.zero(ctx.basis), "plain cubic relation"
    )
    if w is None:
        P2 = (As @ As @ A) - (As @ A @ As).scale(beta) + (A @ As @ As)
        P2 = P2 - ((As @ A) + (A @ As)).scale(gamma_s) - A.scale(rho_s)
        w = _matrices_equal(
            As.commutator(P2), ExactMatrix.zero(ctx.basis), "starred cubic relation"
        )
    return w is None, w


def _check_r3l(ctx: _Context):
    p = ctx.params
    R, L = ctx.R, ctx.L
    lhs = R.commutator(R.commutator(R.commutator(L)))
    level_factor = ExactMatrix.diagonal(
        ctx.basis,
        lambda m: -6 * p.h * p.h_star * (4 * m.weight + p.omega + p.omega_star + 4),
    )
    rhs = (R @ R) @ level_factor
    w = _matrices_equal(lhs, rhs, "triple commutator collapse")
    return w is None, w


def _check_block_structure(ctx: _Context):
    try:
        block_tridiagonal_form(ctx.params, "Astar_in_Vx")
        block_tridiagonal_form(ctx.params, "A_in_Vi")
    except StructureViolation as err:
        return False, {
            "identity": "block tridiagonal form",
            "row": format_multiindex(err.row),
            "col": format_multiindex(err.col),
            "lhs": format_scalar(err.lhs),
            "rhs": format_scalar(err.rhs),
        }
    return True, None


def _check_sas(ctx: _Context):
    p, S = ctx.params, ctx.S
    star_side = _assemble_operator(substituted_for_involution(p, starred=False), "Astar")
    w = _matrices_equal(S @ ctx.A @ S, star_side, "involution on the raising side")
    if w is None:
        plain_side = _assemble_operator(substituted_for_involution(p, starred=True), "A")
        w = _matrices_equal(S @ ctx.As @ S, plain_side, "involution on the lowering side")
    return w is None, w


def _check_overlap_consistency(ctx: _Context):
    p = ctx.params
    for i in ctx.basis:
        for x in ctx.basis:
            ref = overlap_T(p, i, x, T_METHODS[0])
            for method in T_METHODS[1:]:
                got = overlap_T(p, i, x, method)
                if got != ref:
                    return False, {
                        "identity": "T route agreement",
                        "method": method,
                        "i": format_multiindex(i),
                        "x": format_multiindex(x),
                        "lhs": format_scalar(ref),
                        "rhs": format_scalar(got),
                    }
            ref = overlap_U(p, i, x, U_METHODS[0])
            for method in U_METHODS[1:]:
                got = overlap_U(p, i, x, method)
                if got != ref:
                    return False, {
                        "identity": "U route agreement",
                        "method": method,
                        "i": format_multiindex(i),
                        "x": format_multiindex(x),
                        "lhs": format_scalar(ref),
                        "rhs": format_scalar(got),
                    }
    return True, None


def _check_biorthogonality(ctx: _Context):
    mt = overlap_table(ctx.params, "T", "matrix_product")
    mu = overlap_table(ctx.params, "U", "linear_solve")
    w = _matrices_equal(
        mt @ mu.transpose(), ExactMatrix.identity(ctx.basis), "biorthogonality"
    )
    return w is None, w


def _check_racah_reduction(ctx: _Context):
    p = ctx.params
    if p.N != 1:
        return None, "skipped: single-coordinate reduction needs N = 1"
    for i in ctx.basis:
        for x in ctx.basis:
            t_ref = overlap_T(p, i, x, "direct_sum")
            u_ref = overlap_U(p, i, x, "direct_sum")
            for label, got in (
                ("univariate T form", univariate_t_racah(p, i, x)),
                ("balanced U form", univariate_u_balanced(p, i, x)),
                ("normalized U form", univariate_u_racah_normalized(p, i, x)),
            ):
                ref = t_ref if label.endswith("T form") else u_ref
                if got != ref:
                    return False, {
                        "identity": label,
                        "i": format_multiindex(i),
                        "x": format_multiindex(x),
                        "lhs": format_scalar(ref),
                        "rhs": format_scalar(got),
                    }
    return True, None


def _limit_pairs(basis: Sequence[MultiIndex]) -> list:
    pairs = [(i, x) for i in basis for x in basis]
    if len(basis) <= 6:
        return pairs
    step = max(1, len(pairs) // 10)
    return pairs[::step][:10]


def _check_limits(ctx: _Context):
    p = ctx.params
    t = variable_t()
    inv_t = RationalFunction((Fraction(1),), (Fraction(0), Fraction(1)))
    hahn_side = replace(p, h_star=p.h_star * t, omega_star=inv_t)
    kraw_side = replace(p, h=p.h * t, omega=inv_t)
    for i, x in _limit_pairs(ctx.basis):
        lim = limit_at_zero(overlap_T(hahn_side, i, x, "direct_sum"))
        closed = overlap_limit_kind(p, "hahn", i, x)
        if lim != closed:
            return False, {
                "identity": "level-linear starred spectrum limit",
                "i": format_multiindex(i),
                "x": format_multiindex(x),
                "lhs": format_scalar(lim),
                "rhs": format_scalar(closed),
            }
        lim = limit_at_zero(overlap_limit_kind(kraw_side, "hahn", i, x))
        closed = overlap_limit_kind(p, "krawtchouk", i, x)
        if lim != closed:
            return False, {
                "identity": "both spectra linear limit",
                "i": format_multiindex(i),
                "x": format_multiindex(x),
                "lhs": format_scalar(lim),
                "rhs": format_scalar(closed),
            }
    return True, None


def _check_irreducibility(ctx: _Context):
    """Span words in {A, A*} from the identity and row-reduce exactly.

    Reaching dimension d^2 certifies the joint action generates the full
    matrix algebra.  Anything else is inconclusive: saturation below d^2
    or hitting the word-length cap proves nothing at this budget.
    """
    d = ctx.A.dimension
    target = d * d
    pivots: dict = {}

    def insert(m: ExactMatrix) -> bool:
        vec = {k: v for k, v in m.entries.items() if v != 0}
        while vec:
            lead = min(vec)
            if lead not in pivots:
                inv = 1 / vec[lead]
                pivots[lead] = {k: v * inv for k, v in vec.items()}
                return True
            factor = vec[lead]
            for k, v in pivots[lead].items():
                nv = vec.get(k, Fraction(0)) - factor * v
                if nv == 0:
                    vec.pop(k, None)
                else:
                    vec[k] = nv
        return False

    frontier = [ExactMatrix.identity(ctx.basis)]
    insert(frontier[0])
    cap = 2 * d + 2
    length = 0
    while frontier and len(pivots) < target and length < cap:
        length += 1
        nxt = []
        grew = False
        for w in frontier:
            for g in (ctx.A, ctx.As):
                m = g @ w
                if insert(m):
                    grew = True
                    nxt.append(m)
        if not grew:
            break
        frontier = nxt
    if len(pivots) == target:
        return True, {"status": "certified", "span": target, "word_length": length}
    return None, {
        "status": "inconclusive",
        "span": len(pivots),
        "target": target,
        "word_length": length,
    }


# ---------------------------------------------------------------------------
# the suite


def _timed(fn: Callable[[], tuple]) -> CheckResult:
    start = time.perf_counter()
    passed, witness = fn()
    millis = int((time.perf_counter() - start) * 1000)
    return passed, witness, millis


_CHECK_REFS = {
    "constraints": "parameter constraints",
    "eigen": "eigenbasis diagonalization with simple spectra",
    "inverse": "change-of-basis inverse pairs",
    "td_relations": "cubic tridiagonal relations",
    "r3l": "triple commutator collapse onto the level diagonal",
    "block_structure": "block tridiagonal form in each eigenbasis",
    "sas_conjugation": "antidiagonal involution swaps the operators",
    "overlap_consistency": "overlap route agreement",
    "biorthogonality": "overlap biorthogonality",
    "racah_reduction": "single-coordinate closed forms",
    "limits": "degenerate kind limits",
    "irreducibility": "joint action spans the matrix algebra",
}


def run_suite(
    params: TDParameters,
    checks: Optional[Sequence[str]] = None,
    beta: FieldElement = Fraction(2),
) -> VerificationReport:
    """Run the selected checks (default: all but irreducibility).

    Failures never raise; they are report entries with witnesses.  When the
    constraints check fails, dependent checks are reported as skipped.
    TDPAIR_THREADS > 1 runs independent checks on a thread pool.
    """
    if checks is None:
        selected = list(DEFAULT_CHECKS)
    else:
        unknown = [c for c in checks if c not in CHECK_NAMES]
        if unknown:
            raise ValueError(
                f"unknown checks: {', '.join(unknown)}; expected among {CHECK_NAMES}"
            )
        selected = [c for c in CHECK_NAMES if c in set(checks)]

    report = VerificationReport()
    start = time.perf_counter()
    constraint_report = validate_parameters(params)
    constraints_ms = int((time.perf_counter() - start) * 1000)
    if "constraints" in selected:
        failures = [
            {"clause": r.check, "violations": r.witness}
            for r in constraint_report.results
            if r.passed is False
        ]
        report.add(
            CheckResult(
                check="constraints",
                paper_ref=_CHECK_REFS["constraints"],
                passed=constraint_report.passed,
                witness=failures or None,
                millis=constraints_ms,
            )
        )

    rest = [c for c in selected if c != "constraints"]
    if not rest:
        return report
    if not constraint_report.passed:
        for name in rest:
            report.add(
                CheckResult(
                    check=name,
                    paper_ref=_CHECK_REFS[name],
                    passed=None,
                    witness="skipped: constraints failed",
                    millis=0,
                )
            )
        return report

    ctx = _Context(params)
    bodies: dict[str, Callable[[], tuple]] = {
        "eigen": lambda: _check_eigen(ctx),
        "inverse": lambda: _check_inverse(ctx),
        "td_relations": lambda: _check_td_relations(ctx, beta),
        "r3l": lambda: _check_r3l(ctx),
        "block_structure": lambda: _check_block_structure(ctx),
        "sas_conjugation": lambda: _check_sas(ctx),
        "overlap_consistency": lambda: _check_overlap_consistency(ctx),
        "biorthogonality": lambda: _check_biorthogonality(ctx),
        "racah_reduction": lambda: _check_racah_reduction(ctx),
        "limits": lambda: _check_limits(ctx),
        "irreducibility": lambda: _check_irreducibility(ctx),
    }

    workers = _thread_count()
    results: dict[str, tuple] = {}
    if workers > 1 and len(rest) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {name: pool.submit(_timed, bodies[name]) for name in rest}
            for name, fut in futures.items():
                results[name] = fut.result()
    else:
        for name in rest:
            results[name] = _timed(bodies[name])

    for name in rest:  # canonical order regardless of completion order
        passed, witness, millis = results[name]
        report.add(
            CheckResult(
                check=name,
                paper_ref=_CHECK_REFS[name],
                passed=passed,
                witness=witness,
                millis=millis,
            )
        )
    return report


def _thread_count() -> int:
    raw = os.environ.get("TDPAIR_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


# ---------------------------------------------------------------------------
# seeded parameter search


def random_valid_parameters(
    shape: Shape, seed: int, bound: int = 10, max_attempts: int = 1000
) -> TDParameters:
    """Rejection-sample a parameter set that passes every constraint.

    Rationals have numerator in [-bound, bound] and denominator in
    [1, bound].  Draws where omega, omega*, a_p + omega, or a_p - omega*
    land on an integer are rejected too: the identity checks evaluate
    parameter-dependent Pochhammer denominators at shifted arguments, and
    keeping these four quantities off the integers keeps every such
    denominator provably nonzero.  Deterministic for a fixed seed.
    """
    if bound < 4:
        raise ValueError("bound must be at least 4")
    rng = random.Random(seed)

    def draw() -> Fraction:
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))

    def draw_nonzero() -> Fraction:
        while True:
            v = draw()
            if v != 0:
                return v

    for _ in range(max_attempts):
        params = TDParameters(
            shape=shape,
            theta0=draw(),
            theta0_star=draw(),
            h=draw_nonzero(),
            h_star=draw_nonzero(),
            omega=draw(),
            omega_star=draw(),
            a=tuple(draw() for _ in range(shape.N)),
        )
        generic = (
            as_integer(params.omega) is None
            and as_integer(params.omega_star) is None
            and all(as_integer(ap + params.omega) is None for ap in params.a)
            and all(as_integer(ap - params.omega_star) is None for ap in params.a)
        )
        if not generic:
            continue
        if validate_parameters(params).passed:
            return params
    raise SamplingExhausted(
        f"no valid parameters for {shape!r} within {max_attempts} attempts at bound {bound}"
    )
