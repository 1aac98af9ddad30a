"""Numerical cross-checks: adaptive integration against the series, and conservation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .odeparse import PolySystem, Steady, SystemId, builtin, sum_of_rhs
from .series import PuiseuxSeries, evaluate, radius_estimate

__all__ = [
    "BLOWUP",
    "BlowUp",
    "IntegrationResult",
    "integrate",
    "series_vs_integration",
    "validation_window",
    "ConservationReport",
    "conserved_check",
]

BLOWUP = 1e12
DEFAULT_WINDOW = (0.05, 0.1)
GRID_POINTS = 50

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(a - b for a, b in zip(_B5, _B4))


class BlowUp(RuntimeError):
    def __init__(self, escape_time: float):
        super().__init__(f"state exceeded {BLOWUP:g} at t = {escape_time:.12g}")
        self.escape_time = escape_time


@dataclass
class IntegrationResult:
    t_grid: np.ndarray
    states: np.ndarray
    tolerance: float
    rejected_steps: int = 0
    accepted_steps: int = 0
    escape_time: Optional[float] = None

    @property
    def blew_up(self) -> bool:
        return self.escape_time is not None


def _compile(system: PolySystem) -> Callable[[Sequence[float]], List[float]]:
    eqs = [[(float(c), e) for c, e in eq] for eq in system.equations]

    def f(y):
        out = []
        for eq in eqs:
            acc = 0.0
            for c, e in eq:
                term = c
                for yk, k in zip(y, e):
                    if k:
                        term *= yk ** k
                acc += term
            out.append(acc)
        return out

    return f


def integrate(system: PolySystem, init: Sequence[float], t0: float, t1: float, tol: float,
              t_eval: Optional[Sequence[float]] = None) -> IntegrationResult:
    """Dormand-Prince 5(4) with local error control at mixed tolerance ``tol``.

    Steps are clipped to land on every requested output time, so the
    reported states carry no interpolation error.  ``t1 < t0`` integrates
    backward.  If a component exceeds ``BLOWUP`` the run stops and the
    escape time is recorded in the result.
    """
    if not 1e-14 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-14, 1e-6]")
    if t0 == t1:
        raise ValueError("empty integration interval")
    direction = 1.0 if t1 > t0 else -1.0
    if t_eval is None:
        outputs = [float(t1)]
    else:
        outputs = [float(t) for t in t_eval]
        if any((b - a) * direction <= 0 for a, b in zip(outputs, outputs[1:])):
            raise ValueError("t_eval must be strictly monotone in the integration direction")
        if any((t - t0) * direction < 0 or (t - t1) * direction > 0 for t in outputs):
            raise ValueError("t_eval outside the integration interval")
    f = _compile(system)
    y = [float(v) for v in init]
    dim = len(y)
    t = float(t0)
    ts: List[float] = []
    ys: List[List[float]] = []
    k1 = f(y)
    norm0 = max(abs(v) for v in y) or 1.0
    dnorm = max(abs(v) for v in k1) or 1.0
    h = min(abs(t1 - t0), 0.01 * norm0 / dnorm, 0.1) * direction
    rejected = accepted = 0
    escape = None
    idx = 0
    while idx < len(outputs) and outputs[idx] == t:
        ts.append(t)
        ys.append(list(y))
        idx += 1
    while idx < len(outputs):
        target = outputs[idx]
        hit = (t + h - target) * direction >= 0
        step = target - t if hit else h
        if abs(step) < 1e-15 * max(1.0, abs(t)):
            escape = t
            break
        ks = [k1]
        for s in range(1, 7):
            yi = [y[m] + step * sum(a * ks[j][m] for j, a in enumerate(_A[s])) for m in range(dim)]
            ks.append(f(yi))
        ynew = yi  # stage 7 evaluates at the 5th-order solution
        err = 0.0
        for m in range(dim):
            e = step * sum(c * ks[j][m] for j, c in enumerate(_E))
            sc = tol * (1.0 + max(abs(y[m]), abs(ynew[m])))
            err = max(err, abs(e) / sc)
        if not math.isfinite(err):
            err = math.inf
        if err <= 1.0:
            accepted += 1
            t = target if hit else t + step
            y = ynew
            k1 = ks[6]
            if max(abs(v) for v in y) > BLOWUP:
                escape = t
                break
            if hit:
                ts.append(t)
                ys.append(list(y))
                idx += 1
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if not hit or fac < 1.0:
                h = step * fac
        else:
            rejected += 1
            fac = 0.2 if not math.isfinite(err) else max(0.1, 0.9 * err ** -0.2)
            h = step * fac
    return IntegrationResult(np.array(ts), np.array(ys).reshape(len(ts), dim), tol, rejected,
                             accepted, escape)


def validation_window(s: PuiseuxSeries, window: Tuple[float, float] = DEFAULT_WINDOW):
    """``window`` unless the radius estimate is below 0.2, then ``[r/4, r/2]``."""
    if s.order < 20:
        return window
    r = radius_estimate(s)
    if r < 0.2:
        return (r / 4, r / 2)
    return window


def _series_state(s: PuiseuxSeries, t: float) -> List[float]:
    return [float(v) for v in evaluate(s, t, precision_bits=128)]


def series_vs_integration(system: PolySystem, s: PuiseuxSeries, t_a: float, t_b: float,
                          tol: float = 1e-12, check_radius: bool = True) -> float:
    """Max norm-wise relative deviation between the series and an integration started on it.

    With ``check_radius`` the window must end below half the radius
    estimate (series of order 20 or more).
    """
    if not 0 < t_a < t_b:
        raise ValueError("need 0 < t_a < t_b")
    if check_radius and s.order >= 20:
        r = radius_estimate(s)
        if t_b > r / 2 * (1 + 1e-12):
            raise ValueError(f"window end {t_b} exceeds half the radius estimate {r:.6g}")
    grid = np.linspace(t_a, t_b, GRID_POINTS)
    res = integrate(system, _series_state(s, t_a), t_a, t_b, tol, t_eval=grid)
    if res.blew_up:
        raise BlowUp(res.escape_time)
    worst = 0.0
    for t, y in zip(res.t_grid, res.states):
        ref = np.array(_series_state(s, float(t)))
        worst = max(worst, float(np.linalg.norm(y - ref) / np.linalg.norm(ref)))
    return worst


@dataclass
class ConservationReport:
    symbolic_sum: str
    symbolic_zero: bool
    drift: Optional[float] = None
    start: Tuple[float, ...] = ()
    interval: Tuple[float, float] = (0.0, 0.0)

    @property
    def conserved(self) -> bool:
        return self.symbolic_zero and (self.drift is None or self.drift < 1e-10)


def _sum_str(system: PolySystem) -> str:
    from .polys import Poly

    acc = Poly()
    for e, c in sum_of_rhs(system).items():
        term = Poly.const(c)
        for name, k in zip(system.variables, e):
            if k:
                term = term * Poly.symbol(name) ** k
        acc = acc + term
    return str(acc)


def conserved_check(system_id: SystemId, start=(0.3, 0.7), interval=(0.0, 5.0),
                    tol: float = 1e-12) -> ConservationReport:
    """Is ``x + y`` conserved?  Symbolic identity first, then drift along an integration."""
    if not isinstance(system_id, Steady):
        raise ValueError("conservation of x + y is a steady-system check")
    system = builtin(system_id)
    zero = not sum_of_rhs(system)
    rep = ConservationReport(_sum_str(system), zero, start=tuple(start), interval=tuple(interval))
    if zero:
        grid = np.linspace(interval[0], interval[1], 101)
        res = integrate(system, start, interval[0], interval[1], tol, t_eval=grid)
        if res.blew_up:
            raise BlowUp(res.escape_time)
        c0 = sum(start)
        rep.drift = float(np.max(np.abs(res.states.sum(axis=1) - c0)))
    return rep
