"""Truncated Puiseux series built from a branch's coefficient table."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath

from .exactnum import QuadElem, as_fraction, exact_str, fraction_str
from .painleve import BranchReport

__all__ = [
    "PuiseuxSeries",
    "materialize",
    "default_params",
    "evaluate",
    "evaluate_derivative",
    "radius_estimate",
    "to_csv",
]


@dataclass(frozen=True)
class PuiseuxSeries:
    """``x_v(t) = sum_j coeffs[v][j] * t**(exponents[v] + j/Q)``.

    Truncation is on the common grid: variable ``v`` keeps own indices
    ``0 .. order - offsets[v]``.
    """

    variables: Tuple[str, ...]
    Q: int
    exponents: Tuple[Fraction, ...]
    offsets: Tuple[int, ...]
    coeffs: Tuple[Tuple[object, ...], ...]
    order: int
    param_values: Tuple[Tuple[str, Fraction], ...] = ()
    label: str = ""

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def exponent(self, v: int, j: int) -> Fraction:
        return self.exponents[v] + Fraction(j, self.Q)

    def truncated(self, order: int) -> "PuiseuxSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        cs = tuple(col[:max(0, order - off + 1)] for col, off in zip(self.coeffs, self.offsets))
        return PuiseuxSeries(self.variables, self.Q, self.exponents, self.offsets, cs, order,
                             self.param_values, self.label)


def default_params(report: BranchReport, value=1) -> Dict[str, Fraction]:
    return {name: Fraction(value) for name in report.coeffs.param_names}


def materialize(report: BranchReport, param_values: Mapping[str, object],
                order: Optional[int] = None) -> PuiseuxSeries:
    """Substitute exact parameter values into the coefficient table."""
    table = report.coeffs
    available = table.last_step
    if order is None:
        order = available
    if order > available:
        raise ValueError(f"order {order} exceeds the computed order {available}")
    needed = table.param_names
    missing = [p for p in needed if p not in param_values]
    if missing:
        raise ValueError(f"missing parameter assignment for {', '.join(missing)}")
    values = {k: as_fraction(v) for k, v in param_values.items()}
    bal = report.balance
    cols = []
    for v in range(bal.dimension):
        top = order - bal.offsets[v]
        cols.append(tuple(table.at(v, j).evaluate(values) for j in range(top + 1)))
    used = tuple((p, values[p]) for p in needed)
    return PuiseuxSeries(table.variables, bal.Q, bal.exponents, bal.offsets, tuple(cols), order,
                         used, bal.label)


def _mpf(x):
    if isinstance(x, QuadElem):
        return x.to_mpf()
    x = as_fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _check_t(s: PuiseuxSeries, t):
    if s.Q > 1 and t <= 0:
        raise ValueError("branch-point series are evaluated on the principal branch t > 0")
    if t == 0:
        raise ValueError("t = 0 is the singularity")


def evaluate(s: PuiseuxSeries, t, precision_bits: int = 53) -> List:
    """Horner evaluation in ``t**(1/Q)``; returns ``mpmath.mpf`` values."""
    if precision_bits < 53:
        raise ValueError("precision_bits must be at least 53")
    _check_t(s, t)
    with mpmath.workprec(precision_bits + 16):
        tt = mpmath.mpf(t) if not isinstance(t, Fraction) else _mpf(t)
        T = tt if s.Q == 1 else mpmath.root(tt, s.Q)
        out = []
        for v, col in enumerate(s.coeffs):
            acc = mpmath.mpf(0)
            for c in reversed(col):
                acc = acc * T + _mpf(c)
            lead = int(s.exponents[v] * s.Q)
            out.append(acc * T ** lead)
    with mpmath.workprec(precision_bits):
        return [+x for x in out]


def evaluate_derivative(s: PuiseuxSeries, t, precision_bits: int = 53) -> List:
    """Term-wise ``d/dt`` of the truncated series."""
    _check_t(s, t)
    with mpmath.workprec(precision_bits + 16):
        tt = mpmath.mpf(t)
        T = tt if s.Q == 1 else mpmath.root(tt, s.Q)
        out = []
        for v, col in enumerate(s.coeffs):
            acc = mpmath.mpf(0)
            for j in reversed(range(len(col))):
                w = s.exponent(v, j)
                acc = acc * T + _mpf(col[j]) * _mpf(w)
            lead = int(s.exponents[v] * s.Q) - s.Q
            out.append(acc * T ** lead)
    with mpmath.workprec(precision_bits):
        return [+x for x in out]


def radius_estimate(s: PuiseuxSeries) -> float:
    """Root-test estimate ``1 / max |c_j|**(Q/j)`` over the top half of each series."""
    if s.order < 20:
        raise ValueError("radius estimate needs order >= 20")
    best = math.inf
    with mpmath.workprec(80):
        for col in s.coeffs:
            n = len(col) - 1
            if n < 2:
                continue
            worst = mpmath.mpf(0)
            for j in range(max(1, (n + 1) // 2), n + 1):
                c = col[j]
                if not c:
                    continue
                val = mpmath.exp(mpmath.log(abs(_mpf(c))) * s.Q / j)
                worst = max(worst, val)
            if worst:
                best = min(best, float(1 / worst))
    return best


def to_csv(s: PuiseuxSeries) -> str:
    """CSV table ``variable,step,exponent,coefficient,exact``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["variable", "step", "exponent", "coefficient", "exact"])
    with mpmath.workprec(200):
        for v, col in enumerate(s.coeffs):
            for j, c in enumerate(col):
                w.writerow([s.variables[v], j, fraction_str(s.exponent(v, j)),
                            mpmath.nstr(_mpf(c), 30, min_fixed=-5, max_fixed=30), exact_str(c)])
    return buf.getvalue()
