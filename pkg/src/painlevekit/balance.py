"""Leading-order (dominant balance) analysis.

A :class:`Balance` fixes the leading exponents ``e_v`` and coefficients of
a local expansion ``x_v = sum_i c_{v,i} t**(e_v + i/Q)`` around a movable
singularity placed at ``t = 0``.  Two enumerators exist:

* :func:`closed_form_balances` -- closed-form branches of the steady and
  expanding soliton systems;
* :func:`generic_balances` -- a bounded search over rational exponent
  vectors for any :class:`~painlevekit.odeparse.PolySystem`, which solves
  the leading-coefficient equations by linear elimination plus at most one
  quadratic.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactnum import QuadElem, as_fraction, exact_str, is_perfect_square, sqrt_in_field
from .odeparse import Custom, Expanding, PolySystem, Steady, SystemId, builtin
from .polys import Poly

__all__ = [
    "Balance",
    "BalanceList",
    "closed_form_balances",
    "balance_notes",
    "generic_balances",
    "verify_balance",
    "minimal_q",
    "leading_symbol",
]

log = logging.getLogger(__name__)

_LETTERS = "abcdefghijklmnopqrstuvw"


def leading_symbol(index: int) -> str:
    """Name of the formal parameter for a free leading coefficient."""
    return f"{_LETTERS[index] if index < len(_LETTERS) else 'k%d_' % index}0"


@dataclass(frozen=True)
class Balance:
    """One leading-order branch.

    ``leading_coeffs`` holds exact values; entries listed in
    ``free_leading`` are formal parameters whose stored value is only the
    default used for numeric work.  ``offsets[v] = Q*(e_v - min(e))``.
    """

    exponents: Tuple[Fraction, ...]
    leading_coeffs: Tuple[object, ...]
    Q: int
    offsets: Tuple[int, ...]
    free_leading: Tuple[int, ...] = ()
    label: str = ""
    radicand: int = 1
    system: Optional[PolySystem] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for e in self.exponents:
            if (e * self.Q).denominator != 1:
                raise ValueError(f"exponent {e} not on the 1/{self.Q} grid")
        base = min(self.exponents)
        if tuple(int((e - base) * self.Q) for e in self.exponents) != tuple(self.offsets):
            raise ValueError("offsets inconsistent with exponents")

    @property
    def dimension(self) -> int:
        return len(self.exponents)

    @property
    def base_exponent(self) -> Fraction:
        return min(self.exponents)

    @property
    def free_symbols(self) -> Tuple[str, ...]:
        return tuple(leading_symbol(i) for i in self.free_leading)

    def symbolic_leading(self) -> List[Poly]:
        out = []
        for v, c in enumerate(self.leading_coeffs):
            out.append(Poly.symbol(leading_symbol(v)) if v in self.free_leading else Poly.const(c))
        return out

    def with_q(self, Q: int) -> "Balance":
        base = min(self.exponents)
        offsets = tuple(int((e - base) * Q) for e in self.exponents)
        return replace(self, Q=Q, offsets=offsets)

    def with_leading(self, values: Sequence) -> "Balance":
        return replace(self, leading_coeffs=tuple(values))


class BalanceList(list):
    """List of balances; ``unsupported`` records candidates the solver could not handle."""

    def __init__(self, items=(), unsupported=None):
        super().__init__(items)
        self.unsupported: List[dict] = list(unsupported or [])


def _offsets(exponents, Q):
    base = min(exponents)
    return tuple(int((e - base) * Q) for e in exponents)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def minimal_q(bal: Balance) -> int:
    """Smallest Q clearing exponent denominators and rational resonance denominators."""
    from .painleve import resonances

    q = 1
    for e in bal.exponents:
        q = _lcm(q, e.denominator)
    for r in resonances(bal):
        if r.nu is None or not _is_rational(r.nu):
            continue
        v = _rational_value(r.nu)
        if v >= 0:
            q = _lcm(q, v.denominator)
    return q


def _is_rational(x) -> bool:
    return not isinstance(x, QuadElem) or x.is_rational()


def _rational_value(x) -> Fraction:
    return x.a if isinstance(x, QuadElem) else as_fraction(x)


def _make(system, exponents, leading, label, radicand, free=(), Q=None):
    exponents = tuple(as_fraction(e) for e in exponents)
    if Q is None:
        Q = 1
        for e in exponents:
            Q = _lcm(Q, e.denominator)
    return Balance(exponents, tuple(leading), Q, _offsets(exponents, Q), tuple(free),
                   label, radicand, system)


def _finish(bal: Balance, q_policy: str, root_q: Optional[int]) -> Balance:
    if q_policy == "root" and root_q is not None:
        return bal.with_q(root_q)
    if q_policy not in ("minimal", "root"):
        raise ValueError(f"unknown q_policy {q_policy!r}")
    return bal.with_q(minimal_q(bal))


def _steady_pairs(n: int):
    """(label, a0, b0, root Q) for the steady leading system."""
    sq = QuadElem.sqrt(n)
    root = is_perfect_square(n)
    out = [("plus", -1 / (sq + 1), sq / (sq + 1), root + 1 if root is not None else None)]
    if n > 1:
        out.append(("minus", 1 / (sq - 1), sq / (sq - 1), root - 1 if root is not None else None))
    return out


def closed_form_balances(system_id: SystemId, q_policy: str = "minimal") -> List[Balance]:
    """Closed-form branches of the builtin systems.

    ``q_policy="minimal"`` picks the smallest step denominator that puts
    every exponent and nonnegative rational resonance on the grid;
    ``"root"`` uses ``Q = sqrt(n) +- 1`` for perfect-square ``n``.
    Steady(1) additionally gets a ``"plus-q2"`` branch expanded in
    powers of ``t**(1/2)``.
    """
    system = builtin(system_id)
    out: List[Balance] = []
    if isinstance(system_id, Steady):
        n = system_id.n
        for label, a0, b0, pq in _steady_pairs(n):
            bal = _make(system, (-1, -1), (a0, b0), label, n)
            out.append(_finish(bal, q_policy, pq if pq and n > 1 else None))
        if n == 1:
            out.append(_make(system, (-1, -1), out[0].leading_coeffs, "plus-q2", 1).with_q(2))
        return out
    if isinstance(system_id, Expanding):
        n, lam = system_id.n, as_fraction(system_id.lam)
        p, q = lam.numerator, lam.denominator
        d = n * p * q
        # c0 = sqrt(n/lambda) = sqrt(n p q)/p
        c0 = QuadElem(0, Fraction(1, p), d)
        for label, c in (("equal+", c0), ("equal-", -c0)):
            bal = _make(system, (-1, -1, -1), (QuadElem(-1, 0, d), QuadElem(-n, 0, d), c), label, d)
            out.append(_finish(bal, "minimal", None))
        root = is_perfect_square(n)
        if root is not None:
            for label, a0, b0, pq in _steady_pairs(n):
                a0r = a0.a
                bal = _make(system, (-1, -1, a0r), (a0, b0, QuadElem(1, 0, n)),
                            "mixed-" + label, n, free=(2,))
                out.append(_finish(bal, q_policy, pq))
        return out
    raise ValueError("closed-form balances exist only for the steady and expanding systems")


def balance_notes(system_id: SystemId) -> List[str]:
    if isinstance(system_id, Expanding) and is_perfect_square(system_id.n) is None:
        return [f"mixed-exponent branches omitted: n={system_id.n} is not a perfect square, "
                "so the z exponent gamma = a0 would be irrational"]
    return []


# -- residual check -------------------------------------------------------------

def verify_balance(system: PolySystem, bal: Balance) -> list:
    """Exact residuals of the leading-order relations (all zero iff valid)."""
    e = bal.exponents
    c = bal.leading_coeffs
    out = []
    for v, eq in enumerate(system.equations):
        powers = [sum(k * ev for k, ev in zip(exps, e)) for _, exps in eq]
        lead = min([e[v] - 1, *powers])
        acc = e[v] * c[v] if e[v] - 1 == lead else Fraction(0)
        for (coef, exps), pw in zip(eq, powers):
            if pw == lead:
                term = coef
                for cu, k in zip(c, exps):
                    if k:
                        term = term * cu ** k
                acc = acc - term
        out.append(acc)
    return out


# -- generic search --------------------------------------------------------------

class _Unsupported(Exception):
    pass


def _strip_monomial_factor(p: Poly) -> Poly:
    """Divide out the largest monomial dividing every term (unknowns are nonzero)."""
    if not p.terms:
        return p
    common = None
    for m in p.terms:
        dm = dict(m)
        common = dm if common is None else {s: min(e, dm.get(s, 0)) for s, e in common.items()}
    common = {s: e for s, e in common.items() if e}
    if not common:
        return p
    terms = {}
    for m, c in p.terms.items():
        dm = dict(m)
        rest = tuple(sorted((s, e - common.get(s, 0)) for s, e in dm.items() if e - common.get(s, 0)))
        terms[rest] = c
    return Poly(terms)


def _split_square(q: Fraction) -> Tuple[Fraction, int]:
    """Write ``q = s**2 * d`` with integer ``d`` (small squares removed)."""
    num = q.numerator * q.denominator
    scale = Fraction(1, q.denominator)
    sgn = 1 if num >= 0 else -1
    num = abs(num)
    s = 1
    k = 2
    while k * k <= num and k <= 10000:
        while num % (k * k) == 0:
            num //= k * k
            s *= k
        k += 1
    if sgn < 0:
        raise _Unsupported("negative discriminant")
    return scale * s, num


def _solve_leading(eqs: List[Poly], unknowns: List[str]):
    """Solve the leading-coefficient system; returns (radicand, [assignments], free)."""
    eqs = [_strip_monomial_factor(p) for p in eqs if p]
    solved: Dict[str, Poly] = {}
    progress = True
    while progress:
        progress = False
        for idx, p in enumerate(eqs):
            for u in unknowns:
                if u in solved or p.degree_in(u) != 1:
                    continue
                parts = p.coefficients_in(u)
                lin = parts[1]
                if not lin.is_constant() or not lin.constant():
                    continue
                expr = -parts.get(0, Poly()) / lin.constant()
                solved = {k: v.subs({u: expr}) for k, v in solved.items()}
                solved[u] = expr
                rest = [q.subs({u: expr}) for j, q in enumerate(eqs) if j != idx]
                eqs = [_strip_monomial_factor(q) for q in rest if q]
                progress = True
                break
            if progress:
                break

    for p in eqs:
        if p.is_constant():
            return None  # inconsistent: nonzero constant = 0
    syms = set()
    for p in eqs:
        syms |= p.symbols()
    if len(syms) > 1:
        raise _Unsupported(f"coupled nonlinear leading system in {sorted(syms)}")

    roots: List[Dict[str, object]] = [{}]
    radicand = 1
    if syms:
        (u,) = syms
        p = eqs[0]
        parts = {k: c.constant() for k, c in p.coefficients_in(u).items()}
        deg = max(parts)
        if deg != 2:
            raise _Unsupported(f"leading equation of degree {deg} in {u}")
        A, B, C = parts.get(2, 0), parts.get(1, 0), parts.get(0, 0)
        disc = B * B - 4 * A * C
        if isinstance(disc, QuadElem):
            sq = sqrt_in_field(disc)
            if sq is None:
                raise _Unsupported("discriminant is not a square in the coefficient field")
            radicand = disc.d
        else:
            disc = as_fraction(disc)
            if disc < 0:
                return None
            scale, radicand = _split_square(disc)
            sq = QuadElem(0, scale, radicand) if radicand > 1 else QuadElem(scale, 0, 1)
            radicand = max(radicand, 1)
        cand = [(-B + sq) / (2 * A), (-B - sq) / (2 * A)]
        if cand[0] == cand[1]:
            cand = cand[:1]
        roots = []
        for r in cand:
            if all(not q.subs({u: r}) for q in eqs[1:]):
                roots.append({u: r})
    free = [u for u in unknowns if u not in solved and all(u not in r for r in roots)]
    results = []
    for r in roots:
        values = dict(r)
        for u, expr in solved.items():
            val = expr.subs(r)
            if val.symbols() - set(free):
                raise _Unsupported("leading coefficient depends on an unresolved unknown")
            if val.symbols():
                raise _Unsupported("leading coefficient depends on a free parameter")
            values[u] = val.constant()
        results.append(values)
    return radicand, results, free


def _candidates(dim: int, max_den: int, exp_min: Fraction):
    vals = sorted({Fraction(p, q) for q in range(1, max_den + 1)
                   for p in range(math.floor(exp_min * q), 0) if Fraction(p, q) >= exp_min})
    return itertools.product(vals, repeat=dim)


def _lift(x, d):
    if isinstance(x, QuadElem):
        if x.d == d:
            return x
        if x.is_rational():
            return QuadElem(x.a, 0, d)
        raise _Unsupported("two different quadratic extensions required")
    return QuadElem(x, 0, d)


def generic_balances(system: PolySystem, max_den: int = 2, exp_min=-1) -> BalanceList:
    """Bounded dominant-balance search.

    Exponent vectors with entries in ``[exp_min, 0)`` and denominators up
    to ``max_den`` are kept when, in every equation, no monomial is more
    singular than the derivative term and at least one monomial balances
    it.  Candidates whose coefficient system needs more than one quadratic
    are recorded in ``.unsupported`` with reason ``"unsupported-algebra"``.
    """
    exp_min = as_fraction(exp_min)
    if max_den < 1 or exp_min > -1:
        raise ValueError("need max_den >= 1 and exp_min <= -1")
    dim = system.dimension
    names = [leading_symbol(v) for v in range(dim)]
    syms = [Poly.symbol(s) for s in names]
    found: List[Balance] = []
    unsupported: List[dict] = []
    for e in _candidates(dim, max_den, exp_min):
        ok = True
        eqs = []
        for v, eq in enumerate(system.equations):
            lead = e[v] - 1
            dom = []
            for coef, exps in eq:
                pw = sum(k * ev for k, ev in zip(exps, e))
                if pw < lead:
                    ok = False
                    break
                if pw == lead:
                    dom.append((coef, exps))
            if not ok or not dom:
                ok = False
                break
            p = syms[v] * e[v]
            for coef, exps in dom:
                term = Poly.const(coef)
                for s, k in zip(syms, exps):
                    if k:
                        term = term * s ** k
                p = p - term
            eqs.append(p)
        if not ok:
            continue
        try:
            solved = _solve_leading(eqs, names)
        except _Unsupported as exc:
            unsupported.append({"exponents": e, "reason": "unsupported-algebra", "detail": str(exc)})
            log.info("unsupported-algebra for exponents %s: %s", e, exc)
            continue
        if solved is None:
            continue
        radicand, roots, free = solved
        free_idx = tuple(names.index(u) for u in free)
        for values in roots:
            try:
                coeffs = tuple(_lift(values[u], radicand) if u in values else QuadElem(1, 0, radicand)
                               for u in names)
            except _Unsupported as exc:
                unsupported.append({"exponents": e, "reason": "unsupported-algebra",
                                    "detail": str(exc)})
                continue
            if any(not coeffs[v] for v in range(dim) if v not in free_idx):
                continue
            bal = _make(system, e, coeffs, "", radicand, free=free_idx)
            if any(verify_balance(system, bal)):
                continue
            found.append(bal)

    def key(b):
        return (tuple(b.exponents), tuple(float(c) for c in b.leading_coeffs))

    found.sort(key=key)
    out = []
    for k, b in enumerate(found, start=1):
        b = replace(b, label=f"generic-{k}")
        out.append(b.with_q(minimal_q(b)))
    return BalanceList(out, unsupported)
