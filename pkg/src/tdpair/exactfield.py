"""Exact scalar arithmetic and the combinatorial series primitives.

Two concrete scalar types are supported and freely mixed:

* ``fractions.Fraction`` for the field of rationals, and
* :class:`RationalFunction` for the field of univariate rational
  functions in the formal variable ``t`` with rational coefficients.

Plain ``int`` values are accepted everywhere and coerced.  "FieldElement"
below means any of the three.  All operations are pure and every value is
immutable, so everything in this module is safe to use concurrently.

The module also provides the handful of combinatorial primitives that all
closed formulas in the package are assembled from: Pochhammer symbols,
binomial coefficients, and terminating generalized hypergeometric sums.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Sequence, Union

__all__ = [
    "Rational",
    "RationalFunction",
    "FieldElement",
    "ZeroDenominatorPochhammer",
    "PoleAtZero",
    "rational",
    "format_scalar",
    "variable_t",
    "is_zero",
    "as_integer",
    "pochhammer",
    "binomial",
    "pfq_terminating",
    "limit_at_zero",
]

Rational = Fraction

# Polynomials are tuples of Fraction coefficients in ascending degree order
# with no trailing zero; the zero polynomial is the empty tuple.
_Poly = tuple


class ZeroDenominatorPochhammer(ArithmeticError):
    """A denominator Pochhammer symbol vanished where a nonzero value was required.

    ``k`` is the series index (or symbol length) at which the zero factor
    appeared.  For the coefficient formulas of this package the parameter
    constraints rule this out, so reaching it signals a bug or an invalid
    parameter set that slipped past validation.
    """

    def __init__(self, k: int, detail: str = ""):
        self.k = k
        self.detail = detail
        msg = f"denominator Pochhammer symbol vanished at k={k}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class PoleAtZero(ArithmeticError):
    """A rational function was evaluated at t = 0 where it has a pole."""


def _trim(coeffs: Sequence[Fraction]) -> _Poly:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pconst(v: Fraction) -> _Poly:
    return (v,) if v != 0 else ()


def _padd(a: _Poly, b: _Poly) -> _Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, v in enumerate(b):
        out[k] += v
    return _trim(out)


def _pneg(a: _Poly) -> _Poly:
    return tuple(-v for v in a)


def _pmul(a: _Poly, b: _Poly) -> _Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for ka, va in enumerate(a):
        if va == 0:
            continue
        for kb, vb in enumerate(b):
            out[ka + kb] += va * vb
    return _trim(out)


def _pdivmod(a: _Poly, b: _Poly) -> tuple[_Poly, _Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and _trim(r):
        r = list(_trim(r))
        if len(r) < len(b):
            break
        c = r[-1] / lead
        d = len(r) - len(b)
        q[d] = c
        for k, v in enumerate(b):
            r[d + k] -= c * v
        r.pop()
    return _trim(q), _trim(r)


def _pmonic(a: _Poly) -> _Poly:
    if not a or a[-1] == 1:
        return a
    lead = a[-1]
    return tuple(v / lead for v in a)


def _pgcd(a: _Poly, b: _Poly) -> _Poly:
    # Euclid with monic remainders; result is monic (or zero).
    a, b = _pmonic(a), _pmonic(b)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, _pmonic(r)
    return a


def _valuation(a: _Poly) -> int:
    # multiplicity of the root t = 0; 0 for the zero polynomial by convention
    for k, v in enumerate(a):
        if v != 0:
            return k
    return 0


class RationalFunction:
    """A univariate rational function over the rationals, in canonical form.

    Canonical form: numerator and denominator share no common factor and the
    denominator is monic, so equality is plain component comparison.  The
    formal variable is written ``t``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        pn = self._coerce_poly(num)
        pd = self._coerce_poly(den)
        if not pd:
            raise ZeroDivisionError("rational function with zero denominator")
        if not pn:
            self.num, self.den = (), (Fraction(1),)
            return
        # fast path: strip the common power of t before the full gcd
        v = min(_valuation(pn), _valuation(pd))
        if v:
            pn, pd = pn[v:], pd[v:]
        g = _pgcd(pn, pd)
        if len(g) > 1:
            pn, _ = _pdivmod(pn, g)
            pd, _ = _pdivmod(pd, g)
        lead = pd[-1]
        if lead != 1:
            pn = tuple(c / lead for c in pn)
            pd = tuple(c / lead for c in pd)
        self.num = pn
        self.den = pd

    @staticmethod
    def _coerce_poly(v) -> _Poly:
        if isinstance(v, tuple):
            return _trim(tuple(Fraction(c) for c in v))
        if isinstance(v, list):
            return _trim(tuple(Fraction(c) for c in v))
        if isinstance(v, (int, Fraction)):
            return _pconst(Fraction(v))
        if isinstance(v, RationalFunction):
            if v.den != (Fraction(1),):
                raise TypeError("cannot use a non-polynomial rational function as a polynomial")
            return v.num
        raise TypeError(f"cannot build a polynomial from {type(v).__name__}")

    @classmethod
    def _raw(cls, num: _Poly, den: _Poly) -> "RationalFunction":
        obj = cls.__new__(cls)
        RationalFunction.__init__(obj, num, den)
        return obj

    # -- field structure ------------------------------------------------

    def __add__(self, other):
        o = _as_rf(other)
        if o is NotImplemented:
            return NotImplemented
        return RationalFunction(
            _padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
            _pmul(self.den, o.den),
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_rf(other)
        if o is NotImplemented:
            return NotImplemented
        return RationalFunction(
            _padd(_pmul(self.num, o.den), _pneg(_pmul(o.num, self.den))),
            _pmul(self.den, o.den),
        )

    def __rsub__(self, other):
        o = _as_rf(other)
        if o is NotImplemented:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other):
        o = _as_rf(other)
        if o is NotImplemented:
            return NotImplemented
        return RationalFunction(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_rf(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.num:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(_pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        o = _as_rf(other)
        if o is NotImplemented:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if not self.num:
                raise ZeroDivisionError("negative power of zero")
            return RationalFunction(self.den, self.num) ** (-k)
        out = RationalFunction(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return RationalFunction._raw(_pneg(self.num), self.den)

    def __pos__(self):
        return self

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            v = Fraction(other)
            if v == 0:
                return not self.num
            return self.den == (Fraction(1),) and self.num == (v,)
        return NotImplemented

    def __hash__(self):
        # constants hash like the rational they are, so mixed-type dict
        # and set use behaves
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.num, self.den))

    # -- inspection ------------------------------------------------------

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and self.den == (Fraction(1),)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant rational function")
        return self.num[0] if self.num else Fraction(0)

    def degree_pair(self) -> tuple[int, int]:
        """(numerator degree, denominator degree); the zero function is (-1, 0)."""
        return (len(self.num) - 1, len(self.den) - 1)

    def __repr__(self):
        return f"RationalFunction({_fmt_poly(self.num)!r}, {_fmt_poly(self.den)!r})"

    def __str__(self):
        if self.den == (Fraction(1),):
            return _fmt_poly(self.num)
        return f"({_fmt_poly(self.num)})/({_fmt_poly(self.den)})"


def _fmt_poly(p: _Poly) -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        if k == 0:
            parts.append(f"{c}")
        else:
            mono = "t" if k == 1 else f"t^{k}"
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
    out = parts[0]
    for piece in parts[1:]:
        out += piece if piece.startswith("-") else "+" + piece
    return out


def _as_rf(v):
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, (int, Fraction)):
        return RationalFunction(v)
    return NotImplemented


FieldElement = Union[int, Fraction, RationalFunction]


def variable_t() -> RationalFunction:
    """The generator t of the rational-function field."""
    return RationalFunction((0, 1))


def is_zero(v: FieldElement) -> bool:
    return v == 0


def as_integer(v: FieldElement):
    """Return the value as a Python int when it is one, else None."""
    if isinstance(v, bool):
        return None
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else None
    if isinstance(v, RationalFunction):
        if not v.is_constant():
            return None
        return as_integer(v.constant_value())
    return None


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def rational(text: str) -> Fraction:
    """Parse a rational literal of the form "p/q" or "p"."""
    s = text.strip()
    if not _RATIONAL_RE.match(s):
        raise ValueError(f"not a rational literal: {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in rational literal: {text!r}") from None


def format_scalar(v: FieldElement) -> str:
    """Serialize a scalar the way `rational` parses it; never a float."""
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, RationalFunction):
        return str(v)
    raise TypeError(f"not an exact scalar: {type(v).__name__}")


def _coerce(v) -> FieldElement:
    if isinstance(v, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, (Fraction, RationalFunction)):
        return v
    raise TypeError(f"not an exact scalar: {type(v).__name__}")


def pochhammer(x: FieldElement, k: int) -> FieldElement:
    """Rising factorial x(x+1)...(x+k-1); equals 1 when k = 0."""
    if not isinstance(k, int) or k < 0:
        raise ValueError("pochhammer requires a nonnegative integer length")
    acc: FieldElement = Fraction(1)
    x = _coerce(x)
    for j in range(k):
        acc = acc * (x + j)
    return acc


def binomial(n: int, k: int) -> int:
    """Binomial coefficient with the convention 0 outside 0 <= k <= n."""
    if not isinstance(n, int) or n < 0:
        raise ValueError("binomial requires a nonnegative integer n")
    if not isinstance(k, int):
        raise ValueError("binomial requires an integer k")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def pfq_terminating(
    num: Sequence[FieldElement],
    den: Sequence[FieldElement],
    z: FieldElement,
    kmax: int,
) -> FieldElement:
    """Terminating generalized hypergeometric sum.

    Returns sum_{k=0..K} (a_1)_k ... (a_r)_k / [(1)_k (b_1)_k ... (b_s)_k] z^k
    where K = min(kmax, first index at which a numerator Pochhammer vanishes).
    The caller guarantees termination, either through a nonpositive-integer
    numerator parameter or through kmax.

    Raises ZeroDenominatorPochhammer(k) if some (b_j)_k vanishes while the
    k-th term's numerator is nonzero.
    """
    if not isinstance(kmax, int) or kmax < 0:
        raise ValueError("kmax must be a nonnegative integer")
    nums = [_coerce(v) for v in num]
    dens = [_coerce(v) for v in den]
    zz = _coerce(z)
    total: FieldElement = Fraction(1)
    term: FieldElement = Fraction(1)
    for k in range(1, kmax + 1):
        numfac: FieldElement = Fraction(1)
        for av in nums:
            numfac = numfac * (av + (k - 1))
        if numfac == 0:
            break  # the series terminated at k-1
        denfac: FieldElement = Fraction(k)
        for bv in dens:
            denfac = denfac * (bv + (k - 1))
        if denfac == 0:
            raise ZeroDenominatorPochhammer(k, "hypergeometric denominator parameter")
        term = term * numfac / denfac * zz
        if term == 0:
            break  # z = 0; every later term vanishes too
        total = total + term
    return total


def limit_at_zero(f) -> Fraction:
    """Value of a rational function at t = 0, after full reduction.

    Accepts plain rationals (returned unchanged) for convenience.
    Raises PoleAtZero when the reduced denominator vanishes at 0.
    """
    if isinstance(f, (int, Fraction)):
        return Fraction(f)
    if not isinstance(f, RationalFunction):
        raise TypeError(f"not a rational function: {type(f).__name__}")
    den0 = f.den[0]  # canonical form, so num/den share no factor of t
    if den0 == 0:
        raise PoleAtZero(f"pole at t = 0: {f}")
    num0 = f.num[0] if f.num else Fraction(0)
    return num0 / den0
