"""Exact rational and quadratic-field arithmetic.

Rationals are plain :class:`fractions.Fraction` values.  :class:`QuadElem`
represents ``a + b*sqrt(d)`` with rational ``a, b`` and a nonnegative
integer radicand ``d`` that is stored exactly as given (no square-free
reduction).  When ``d`` is itself a perfect square the root is folded
into the rational part at construction time.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

__all__ = [
    "QuadElem",
    "RadicandMismatch",
    "as_fraction",
    "is_perfect_square",
    "rational_sqrt",
    "sqrt_in_field",
    "n2_plus_8n_is_square",
    "fraction_str",
    "parse_fraction",
    "exact_str",
    "sign",
    "to_json",
    "from_json",
]

Scalar = Union[int, Fraction, "QuadElem"]


class RadicandMismatch(ValueError):
    """Raised when two quadratic-field elements with different radicands meet."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def parse_fraction(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; decimal points are rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def fraction_str(x: Fraction) -> str:
    return str(Fraction(x))


def is_perfect_square(k: int) -> Optional[int]:
    """Return ``isqrt(k)`` if ``k`` is a perfect square, else ``None``."""
    if k < 0:
        raise ValueError("is_perfect_square expects a nonnegative integer")
    r = math.isqrt(k)
    return r if r * r == k else None


@functools.lru_cache(maxsize=256)
def _folded_root(d: int) -> Optional[int]:
    return is_perfect_square(d)


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or ``None``."""
    q = as_fraction(q)
    if q < 0:
        return None
    p = is_perfect_square(q.numerator)
    if p is None:
        return None
    r = is_perfect_square(q.denominator)
    if r is None:
        return None
    return Fraction(p, r)


def n2_plus_8n_is_square(n: int) -> bool:
    if n < 1:
        raise ValueError("n must be a positive integer")
    return is_perfect_square(n * n + 8 * n) is not None


class QuadElem:
    """Element ``a + b*sqrt(d)`` of the field Q(sqrt(d)).

    Instances are immutable.  Arithmetic with ints and Fractions coerces
    them into the field; arithmetic between two elements with different
    radicands raises :class:`RadicandMismatch`.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 0):
        if not isinstance(d, int) or isinstance(d, bool) or d < 0:
            raise ValueError(f"radicand must be a nonnegative integer, got {d!r}")
        a = as_fraction(a)
        b = as_fraction(b)
        if b:
            r = _folded_root(d)
            if r is not None:
                a, b = a + b * r, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadElem is immutable")

    @classmethod
    def sqrt(cls, d: int) -> "QuadElem":
        return cls(0, 1, d)

    def normalize(self) -> "QuadElem":
        return QuadElem(self.a, self.b, self.d)

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> Optional["QuadElem"]:
        if isinstance(other, QuadElem):
            if other.d != self.d:
                raise RadicandMismatch(
                    f"radicands differ: sqrt({self.d}) vs sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(other, 0, self.d)
        return None

    # -- predicates -------------------------------------------------------
    def is_rational(self) -> bool:
        return self.b == 0

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    # -- field operations -------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(o.a - self.a, o.b - self.b, self.d)

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.a * other, self.b * other, self.d)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.b:
            return QuadElem(self.a * o.a, self.a * o.b, self.d)
        if not o.b:
            return QuadElem(self.a * o.a, self.b * o.a, self.d)
        return QuadElem(self.a * o.a + self.d * self.b * o.b,
                        self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadElem":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(sqrt(%d))" % self.d)
        nrm = self.norm()
        return QuadElem(self.a / nrm, -self.b / nrm, self.d)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return QuadElem(self.a / other, self.b / other, self.d)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadElem(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadElem):
            if other.d != self.d:
                # both rational: compare values; otherwise they are different fields
                if not self.b and not other.b:
                    return self.a == other.a
                return False
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def sign(self) -> int:
        """Exact sign of the real number ``a + b*sqrt(d)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d*b^2
        diff = self.a * self.a - self.d * self.b * self.b
        return sa if diff > 0 else sb

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def to_mpf(self):
        import mpmath

        return mpmath.mpf(self.a.numerator) / self.a.denominator + (
            mpmath.mpf(self.b.numerator) / self.b.denominator) * mpmath.sqrt(self.d)

    def __repr__(self):
        return f"QuadElem({exact_str(self)})"

    def __str__(self):
        return exact_str(self)


def sign(x) -> int:
    if isinstance(x, QuadElem):
        return x.sign()
    return (x > 0) - (x < 0)


def exact_str(x) -> str:
    """``"p/q"`` or ``"p/q + r/s*sqrt(d)"``."""
    if not isinstance(x, QuadElem):
        return fraction_str(as_fraction(x))
    if not x.b:
        return fraction_str(x.a)
    mag = abs(x.b)
    rad = f"sqrt({x.d})" if mag == 1 else f"{fraction_str(mag)}*sqrt({x.d})"
    if not x.a:
        return rad if x.b > 0 else f"-{rad}"
    op = "+" if x.b > 0 else "-"
    return f"{fraction_str(x.a)} {op} {rad}"


def to_json(x) -> dict:
    if isinstance(x, QuadElem):
        return {"a": fraction_str(x.a), "b": fraction_str(x.b), "d": x.d}
    return {"a": fraction_str(as_fraction(x)), "b": "0", "d": 0}


def from_json(obj: dict) -> QuadElem:
    return QuadElem(parse_fraction(obj["a"]), parse_fraction(obj["b"]), int(obj["d"]))


def sqrt_in_field(x, d: Optional[int] = None) -> Optional[QuadElem]:
    """Return ``y`` in Q(sqrt(d)) with ``y*y == x``, or ``None``.

    Solves ``u^2 + d v^2 = a``, ``2uv = b`` over the rationals.
    """
    if not isinstance(x, QuadElem):
        if d is None:
            raise ValueError("radicand required for a rational argument")
        x = QuadElem(x, 0, d)
    d = x.d
    a, b = x.a, x.b
    if not b:
        u = rational_sqrt(a)
        if u is not None:
            return QuadElem(u, 0, d)
        if d == 0:
            return None
        v = rational_sqrt(a / d)
        if v is not None:
            return QuadElem(0, v, d)
        return None
    # b != 0 forces u, v != 0 and u^2 = (a +- sqrt(a^2 - d b^2)) / 2
    r = rational_sqrt(x.norm())
    if r is None:
        return None
    for u2 in ((a + r) / 2, (a - r) / 2):
        u = rational_sqrt(u2)
        if u:
            y = QuadElem(u, b / (2 * u), d)
            if y * y == x:
                return y
    return None
