"""Sparse multivariate polynomials with exact scalar coefficients.

Used for series coefficients that depend on free parameters, for the
leading-coefficient systems of the balance search, and for characteristic
polynomials in the resonance variable.  Scalars are ``Fraction`` or
:class:`~painlevekit.exactnum.QuadElem`; a monomial is a sorted tuple of
``(symbol, exponent)`` pairs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

from .exactnum import QuadElem, exact_str

Monomial = Tuple[Tuple[str, int], ...]

_ONE: Monomial = ()


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for s, e in m2:
        acc[s] = acc.get(s, 0) + e
    return tuple(sorted(acc.items()))


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, QuadElem))


class Poly:
    """Immutable polynomial ``sum(coef * monomial)``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] = ()):
        clean: Dict[Monomial, object] = {}
        for m, c in dict(terms).items():
            if c:
                clean[m] = Fraction(c) if isinstance(c, int) else c
        self.terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        return cls({_ONE: c})

    @classmethod
    def symbol(cls, name: str) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    @staticmethod
    def lift(x) -> "Poly":
        return x if isinstance(x, Poly) else Poly.const(x)

    # -- inspection ---------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE in self.terms)

    def constant(self):
        """The constant term (0 if absent)."""
        return self.terms.get(_ONE, Fraction(0))

    def symbols(self) -> set:
        return {s for m in self.terms for s, _ in m}

    def degree_in(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self.terms), default=0)

    def coefficients_in(self, name: str) -> Dict[int, "Poly"]:
        """Split as ``sum_k P_k * name**k``; returns ``{k: P_k}``."""
        out: Dict[int, Dict[Monomial, object]] = {}
        for m, c in self.terms.items():
            k = 0
            rest = []
            for s, e in m:
                if s == name:
                    k = e
                else:
                    rest.append((s, e))
            out.setdefault(k, {})[tuple(rest)] = c
        return {k: Poly(v) for k, v in out.items()}

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Poly):
            acc = dict(self.terms)
            for m, c in other.terms.items():
                acc[m] = acc[m] + c if m in acc else c
            return Poly(acc)
        if _is_scalar(other):
            if not other:
                return self
            acc = dict(self.terms)
            acc[_ONE] = acc[_ONE] + other if _ONE in acc else other
            return Poly(acc)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, Poly) or _is_scalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            if not self.terms or not other.terms:
                return Poly()
            if len(other.terms) == 1 and _ONE in other.terms:
                return self * other.terms[_ONE]
            if len(self.terms) == 1 and _ONE in self.terms:
                return other * self.terms[_ONE]
            acc: Dict[Monomial, object] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = _mono_mul(m1, m2)
                    v = c1 * c2
                    acc[m] = acc[m] + v if m in acc else v
            return Poly(acc)
        if _is_scalar(other):
            if not other:
                return Poly()
            return Poly({m: c * other for m, c in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            if not other:
                raise ZeroDivisionError("polynomial division by zero")
            if isinstance(other, QuadElem):
                inv = other.inverse()
                return Poly({m: c * inv for m, c in self.terms.items()})
            return Poly({m: c / other for m, c in self.terms.items()})
        if isinstance(other, Poly) and other.is_constant():
            return self / other.constant()
        raise TypeError("only division by nonzero constants is supported")

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- evaluation -------------------------------------------------------
    def subs(self, values: Mapping[str, object]) -> "Poly":
        """Substitute scalars or polynomials for some symbols."""
        acc = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            rest = []
            for s, e in m:
                if s in values:
                    term = term * (Poly.lift(values[s]) ** e)
                else:
                    rest.append((s, e))
            if rest:
                term = term * Poly({tuple(rest): Fraction(1)})
            acc = acc + term
        return acc

    def evaluate(self, values: Mapping[str, object]):
        """Substitute every symbol and return the scalar value."""
        p = self.subs(values)
        if not p.is_constant():
            missing = sorted(p.symbols())
            raise KeyError(f"no value for symbols {missing}")
        return p.constant()

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if _is_scalar(other):
            if not other:
                return not self.terms
            return self.is_constant() and self.constant() == other
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for m in sorted(self.terms, key=lambda m: (-sum(e for _, e in m), m)):
            c = self.terms[m]
            mono = "*".join(s if e == 1 else f"{s}^{e}" for s, e in m)
            neg = False
            if isinstance(c, QuadElem) and not c.is_rational():
                body = f"({exact_str(c)})"
            else:
                c = c.a if isinstance(c, QuadElem) else c
                neg = c < 0
                body = exact_str(abs(c))
            if mono:
                body = mono if body == "1" else f"{body}*{mono}"
            if not out:
                out = ("-" if neg else "") + body
            else:
                out += (" - " if neg else " + ") + body
        return out


def poly_sum(items: Iterable) -> Poly:
    acc = Poly()
    for x in items:
        acc = acc + x
    return acc
