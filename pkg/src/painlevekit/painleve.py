"""The Painlevé test engine.

The recursion for the series coefficients is obtained by substituting the
truncated expansions ``x_v = sum_j c_{v,j} t**(e_v + j/Q)`` into the
polynomial vector field and matching the coefficient of
``t**(e_v - 1 + i/Q)`` in equation ``v``.  At step ``i`` this gives

    X(i) c_i = R_i(c_0, ..., c_{i-1}),
    X(i) = diag(e_v + i/Q) - J,

where ``J`` is the Jacobian of the *dominant* monomials at the leading
coefficients.  Resonances are the roots of ``det X`` as a polynomial in
``nu = i/Q``; at a resonance step the right-hand side must lie in the
image of ``X(i)`` (compatibility), and each kernel direction carries a new
free parameter.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .balance import Balance, balance_notes, generic_balances, closed_form_balances
from .exactnum import QuadElem, as_fraction, exact_str, sqrt_in_field
from .linalg import UnsupportedAlgebra, determinant, eliminate, numeric_ranks, solve
from .odeparse import Custom, Expanding, PolySystem, Steady, SystemId, builtin
from .polys import Poly

__all__ = [
    "Rationality",
    "Status",
    "VerdictKind",
    "ResonanceInfo",
    "CoeffTable",
    "BranchReport",
    "Verdict",
    "SystemReport",
    "Recursion",
    "recursion_matrix",
    "recursion_rhs",
    "characteristic_polynomial",
    "resonances",
    "new_table",
    "advance",
    "check_compatibility",
    "analyze_branch",
    "analyze_system",
    "classify",
    "default_order",
    "NU",
    "UnsupportedAlgebra",
]

log = logging.getLogger(__name__)

NU = "nu"
_NU = Poly.symbol(NU)
SAMPLE_POINTS = (1, 2, 3)


class Rationality(str, enum.Enum):
    INTEGER = "Integer"
    RATIONAL_NON_INTEGER = "RationalNonInteger"
    IRRATIONAL = "Irrational"
    NEGATIVE = "Negative"


class Status(str, enum.Enum):
    FULL_FAMILY = "FullFamily"
    PARTIAL_FAMILY = "PartialFamily"
    INCOMPATIBLE = "Incompatible"
    IRRATIONAL_RESONANCE = "IrrationalResonance"


class VerdictKind(str, enum.Enum):
    STRONG = "strong"
    WEAK = "weak"
    FAIL = "fail"


@dataclass
class ResonanceInfo:
    nu: Optional[object]  # exact root, or None when it has no quadratic representation
    approx: float
    multiplicity: int = 1
    step: Optional[int] = None
    rationality: Rationality = Rationality.IRRATIONAL
    kernel_dim: Optional[int] = None
    compatible: Optional[bool] = None
    samples: Optional[int] = None

    @property
    def nu_str(self) -> str:
        if self.nu is None:
            return f"~{self.approx:.12g}"
        return exact_str(self.nu)


@dataclass
class CoeffTable:
    """Own-index coefficients: ``coeffs[v][j]`` multiplies ``t**(e_v + j/Q)``."""

    variables: Tuple[str, ...]
    coeffs: List[List[Poly]]
    params: List[Tuple[str, int]] = field(default_factory=list)
    events: Dict[int, Tuple[int, bool]] = field(default_factory=dict)
    halted_at: Optional[int] = None
    offsets: Tuple[int, ...] = ()

    @property
    def last_step(self) -> int:
        return len(self.coeffs[0]) - 1

    def at(self, v: int, j: int) -> Poly:
        col = self.coeffs[v]
        return col[j] if 0 <= j < len(col) else Poly()

    def at_global(self, v: int, step: int) -> Poly:
        """Coefficient of ``t**(base + step/Q)``; zero below the variable's offset."""
        off = self.offsets[v] if self.offsets else 0
        return self.at(v, step - off)

    def step_vector(self, i: int) -> List[Poly]:
        return [self.at(v, i) for v in range(len(self.variables))]

    @property
    def param_names(self) -> List[str]:
        return [p for p, _ in self.params]


@dataclass
class BranchReport:
    balance: Balance
    resonances: List[ResonanceInfo]
    coeffs: CoeffTable
    free_param_count: int
    max_params: int
    status: Status
    order: int
    char_poly: List[object] = field(default_factory=list)  # coefficients of det X in nu, low to high
    notes: List[str] = field(default_factory=list)

    @property
    def label(self) -> str:
        return self.balance.label

    @property
    def nonnegative_resonances(self) -> List[ResonanceInfo]:
        return [r for r in self.resonances if r.rationality != Rationality.NEGATIVE]

    @property
    def meromorphic(self) -> bool:
        """All exponents and nonnegative resonances are integers."""
        if any(e.denominator != 1 for e in self.balance.exponents):
            return False
        return all(r.rationality == Rationality.INTEGER for r in self.nonnegative_resonances)


@dataclass
class Verdict:
    kind: VerdictKind
    reasons: List[str]

    def __str__(self):
        return self.kind.value


@dataclass
class SystemReport:
    system: PolySystem
    system_id: SystemId
    branches: List[BranchReport]
    verdict: Verdict
    notes: List[str] = field(default_factory=list)
    validation: List[dict] = field(default_factory=list)

    def branch(self, label: str) -> BranchReport:
        for b in self.branches:
            if b.label == label:
                return b
        raise KeyError(f"unknown branch {label!r}; available: {[b.label for b in self.branches]}")


# -- recursion -------------------------------------------------------------------

class Recursion:
    """Series-substitution recursion of one balance."""

    def __init__(self, bal: Balance):
        if bal.system is None:
            raise ValueError("balance is not attached to a system")
        self.balance = bal
        system = bal.system
        e = bal.exponents
        Q = bal.Q
        self.dim = system.dimension
        self.leading = bal.symbolic_leading()
        # terms[v] = [(coef, factor indices, shift)]
        self.terms: List[List[Tuple[Fraction, Tuple[int, ...], int]]] = []
        jac: List[List[Poly]] = [[Poly() for _ in range(self.dim)] for _ in range(self.dim)]
        for v, eq in enumerate(system.equations):
            rows = []
            for coef, exps in eq:
                power = sum(k * ev for k, ev in zip(exps, e))
                shift = (power - (e[v] - 1)) * Q
                if shift < 0 or shift.denominator != 1:
                    raise ValueError(
                        f"monomial {exps} in equation {v} is not dominated by the derivative "
                        f"for exponents {tuple(str(x) for x in e)} (shift {shift})")
                factors = tuple(u for u, k in enumerate(exps) for _ in range(k))
                rows.append((coef, factors, int(shift)))
                if shift == 0:
                    for u, k in enumerate(exps):
                        if not k:
                            continue
                        term = Poly.const(coef * k)
                        for w, kw in enumerate(exps):
                            power_w = kw - (1 if w == u else 0)
                            if power_w:
                                term = term * self.leading[w] ** power_w
                        jac[v][u] = jac[v][u] + term
            self.terms.append(rows)
        self.jacobian = jac

    def matrix_nu(self) -> List[List[Poly]]:
        """``X`` with ``nu`` left symbolic."""
        e = self.balance.exponents
        out = []
        for v in range(self.dim):
            row = []
            for u in range(self.dim):
                ent = -self.jacobian[v][u]
                if u == v:
                    ent = ent + _NU + e[v]
                row.append(ent)
            out.append(row)
        return out

    def matrix(self, i: int) -> List[List[Poly]]:
        e = self.balance.exponents
        nu = Fraction(i, self.balance.Q)
        out = []
        for v in range(self.dim):
            row = []
            for u in range(self.dim):
                ent = -self.jacobian[v][u]
                if u == v:
                    ent = ent + (e[v] + nu)
                row.append(ent)
            out.append(row)
        return out

    def rhs(self, table: CoeffTable, i: int) -> List[Poly]:
        """Everything at step ``i`` not involving the step-``i`` unknowns."""
        coeffs = [col[:i] for col in table.coeffs]
        out = []
        for rows in self.terms:
            acc = Poly()
            for coef, factors, shift in rows:
                n = i - shift
                if n < 0:
                    continue
                val = _product_coefficient(factors, n, coeffs)
                if val:
                    acc = acc + val * coef
            out.append(acc)
        return out


def _product_coefficient(factors: Tuple[int, ...], n: int, coeffs) -> Poly:
    """Coefficient of ``T**n`` in ``prod_k sum_j coeffs[factors[k]][j] T**j``."""
    if not factors:
        return Poly.const(1) if n == 0 else Poly()
    if len(factors) == 1:
        col = coeffs[factors[0]]
        return col[n] if n < len(col) else Poly()
    acc = coeffs[factors[0]][:n + 1]
    for u in factors[1:-1]:
        col = coeffs[u]
        nxt = []
        for m in range(min(n + 1, len(acc) + len(col) - 1)):
            s = Poly()
            for j in range(max(0, m - len(col) + 1), min(m, len(acc) - 1) + 1):
                a = acc[j]
                if a:
                    b = col[m - j]
                    if b:
                        s = s + a * b
            nxt.append(s)
        acc = nxt
    last = coeffs[factors[-1]]
    s = Poly()
    for j in range(max(0, n - len(last) + 1), min(n, len(acc) - 1) + 1):
        a = acc[j]
        if a:
            b = last[n - j]
            if b:
                s = s + a * b
    return s


def recursion_matrix(bal: Balance, i: int):
    """``X(i)``; entries are :class:`Poly` (constants unless a leading coefficient is free)."""
    if i < 0:
        raise ValueError("step must be nonnegative")
    return Recursion(bal).matrix(i)


def recursion_rhs(bal: Balance, table: CoeffTable, i: int) -> List[Poly]:
    return Recursion(bal).rhs(table, i)


# -- resonances -------------------------------------------------------------------

def characteristic_polynomial(bal: Balance) -> List[object]:
    """Coefficients (low to high) of ``det X`` as a polynomial in ``nu``."""
    det = determinant(Recursion(bal).matrix_nu())
    parts = det.coefficients_in(NU)
    deg = max(parts) if parts else 0
    out = []
    for k in range(deg + 1):
        p = parts.get(k, Poly())
        if not p.is_constant():
            raise UnsupportedAlgebra("det X depends on free leading coefficients")
        out.append(p.constant())
    return out


def _peval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs, r):
    """Divide by ``(nu - r)`` (synthetic division)."""
    deg = len(coeffs) - 1
    out = [0] * deg
    carry = 0
    for k in range(deg, 0, -1):
        carry = coeffs[k] + carry * r
        out[k - 1] = carry
    return out


def _to_float(x) -> float:
    return float(x)


def _rational_of(x) -> Optional[Fraction]:
    if isinstance(x, QuadElem):
        return x.a if x.is_rational() else None
    return as_fraction(x)


def _classify_root(x, approx: float, Q: int) -> Tuple[Rationality, Optional[int]]:
    r = _rational_of(x) if x is not None else None
    if r is not None:
        if r < 0:
            return Rationality.NEGATIVE, None
        step = r * Q
        st = int(step) if step.denominator == 1 else None
        if r.denominator == 1:
            return Rationality.INTEGER, st
        return Rationality.RATIONAL_NON_INTEGER, st
    sgn = x.sign() if isinstance(x, QuadElem) else (1 if approx > 0 else -1)
    if sgn < 0:
        return Rationality.NEGATIVE, None
    return Rationality.IRRATIONAL, None


def _split_square_int(q: Fraction):
    num = q.numerator * q.denominator
    s = 1
    k = 2
    while k * k <= num and k <= 100000:
        while num % (k * k) == 0:
            num //= k * k
            s *= k
        k += 1
    return Fraction(s, q.denominator), num


def _quadratic_roots(A, B, C, radicand: int) -> List[Tuple[object, float, int]]:
    disc = B * B - 4 * A * C
    if not disc:
        r = -B / (2 * A)
        return [(r, _to_float(r), 2)]
    sq = sqrt_in_field(disc if isinstance(disc, QuadElem) else QuadElem(disc, 0, radicand))
    if sq is not None:
        return [((-B + s) / (2 * A), _to_float((-B + s) / (2 * A)), 1) for s in (sq, -sq)]
    ra, rb, rc = _rational_of(A), _rational_of(B), _rational_of(C)
    if ra is not None and rb is not None and rc is not None:
        dq = rb * rb - 4 * ra * rc
        if dq > 0:
            scale, dd = _split_square_int(dq)
            out = []
            for sg in (1, -1):
                root = QuadElem(-rb / (2 * ra), sg * scale / (2 * ra), dd)
                out.append((root, float(root), 1))
            return out
    # roots outside any single quadratic extension; keep a numeric value only
    import mpmath

    with mpmath.workprec(200):
        a, b, c = (x.to_mpf() if isinstance(x, QuadElem) else mpmath.mpf(x.numerator) / x.denominator
                   for x in (QuadElem(A, 0, radicand) if not isinstance(A, QuadElem) else A,
                             QuadElem(B, 0, radicand) if not isinstance(B, QuadElem) else B,
                             QuadElem(C, 0, radicand) if not isinstance(C, QuadElem) else C))
        dsc = b * b - 4 * a * c
        rts = [(-b + mpmath.sqrt(dsc)) / (2 * a), (-b - mpmath.sqrt(dsc)) / (2 * a)]
    return [(None, float(mpmath.re(r)), 1) for r in rts]


def resonances(bal: Balance) -> List[ResonanceInfo]:
    """Roots of ``det X(nu)`` with rationality, multiplicity and (if on the grid) step."""
    coeffs = characteristic_polynomial(bal)
    roots: List[Tuple[object, float, int]] = []
    for known in (Fraction(-1), Fraction(0)):
        mult = 0
        while len(coeffs) > 1 and not _peval(coeffs, known):
            coeffs = _deflate(coeffs, known)
            mult += 1
        if mult:
            roots.append((known, float(known), mult))
    deg = len(coeffs) - 1
    if deg == 1:
        r = -coeffs[0] / coeffs[1]
        roots.append((r, _to_float(r), 1))
    elif deg == 2:
        roots.extend(_quadratic_roots(coeffs[2], coeffs[1], coeffs[0], bal.radicand))
    elif deg > 2:
        raise UnsupportedAlgebra("det X has degree > 3 after removing nu = -1 and nu = 0")
    out = []
    for x, approx, mult in roots:
        cls, step = _classify_root(x, approx, bal.Q)
        out.append(ResonanceInfo(nu=x, approx=approx, multiplicity=mult, step=step,
                                 rationality=cls))
    out.sort(key=lambda r: r.approx)
    return out


def default_order(bal: Balance, res: Optional[List[ResonanceInfo]] = None) -> int:
    res = resonances(bal) if res is None else res
    top = max((_rational_of(r.nu) for r in res
               if r.nu is not None and _rational_of(r.nu) is not None and r.approx >= 0),
              default=Fraction(0))
    return max(2 * bal.Q * math.ceil(top), 40)


# -- advancing the table -------------------------------------------------------------

def new_table(bal: Balance) -> CoeffTable:
    lead = bal.symbolic_leading()
    table = CoeffTable(variables=bal.system.variables if bal.system else (),
                       coeffs=[[c] for c in lead],
                       offsets=tuple(bal.offsets))
    for v in bal.free_leading:
        table.params.append((bal.free_symbols[bal.free_leading.index(v)], 0))
    return table


def _param_name(k: int) -> str:
    return "s" if k == 0 else f"s{k + 1}"


def check_compatibility(X, rhs, symbolic: bool = False) -> Tuple[bool, int]:
    """Is ``rhs`` in the image of the singular matrix ``X``, identically in the parameters?

    Parameter-free ``X``: exact elimination with the parameters kept
    symbolic.  Otherwise the default samples every parameter at 1, 2, 3
    and compares ``rank X`` with ``rank [X | rhs]`` at each point;
    ``symbolic=True`` eliminates over the polynomial ring instead.
    Returns ``(compatible, kernel_dim)``.
    """
    X = [[Poly.lift(x) for x in row] for row in X]
    rhs = [Poly.lift(x) for x in rhs]
    x_const = all(x.is_constant() for row in X for x in row)
    if x_const or symbolic:
        elim = eliminate(X, rhs)
        return elim.compatible, elim.kernel_dim
    names = sorted(set().union(*(x.symbols() for row in X for x in row),
                               *(r.symbols() for r in rhs)))
    compatible = True
    rank = 0
    import itertools

    for point in itertools.product(SAMPLE_POINTS, repeat=len(names)):
        vals = dict(zip(names, (Fraction(p) for p in point)))
        Xs = [[x.subs(vals) for x in row] for row in X]
        bs = [r.subs(vals) for r in rhs]
        ra, rab = numeric_ranks(Xs, bs)
        rank = max(rank, ra)
        if ra != rab:
            compatible = False
    return compatible, len(X[0]) - rank


def sample_count(X, rhs) -> int:
    names = set()
    for row in X:
        for x in row:
            names |= Poly.lift(x).symbols()
    if not names:
        return 0
    for r in rhs:
        names |= Poly.lift(r).symbols()
    return len(SAMPLE_POINTS) ** len(names)


def advance(bal: Balance, table: CoeffTable, i: int, *, symbolic: bool = False,
            recursion: Optional[Recursion] = None) -> CoeffTable:
    """Solve step ``i`` and append it to ``table`` (in place; the table is returned).

    At a singular step the compatibility decision and kernel dimension are
    stored in ``table.events[i]``; an incompatible step sets
    ``table.halted_at`` and leaves the table ending at ``i - 1``.
    """
    if table.halted_at is not None:
        return table
    if table.last_step != i - 1:
        raise ValueError(f"table holds steps through {table.last_step}, cannot advance to {i}")
    rec = recursion or Recursion(bal)
    X = rec.matrix(i)
    rhs = rec.rhs(table, i)
    counter = [len([p for p, st in table.params if st > 0])]
    new_params: List[Tuple[str, int]] = []

    def fresh(col):
        name = _param_name(counter[0])
        counter[0] += 1
        new_params.append((name, i))
        return Poly.symbol(name)

    values, elim = solve(X, rhs, fresh)
    if elim.kernel_dim:
        compatible, kdim = check_compatibility(X, rhs, symbolic=symbolic)
        if compatible != elim.compatible:
            log.warning("sampled and eliminated compatibility disagree at step %d", i)
        table.events[i] = (kdim, compatible)
        if not compatible or values is None:
            table.halted_at = i
            return table
    elif values is None:
        raise AssertionError("nonsingular step reported incompatible")
    for v, val in enumerate(values):
        table.coeffs[v].append(val)
    table.params.extend(new_params)
    return table


# -- branch and system analysis -------------------------------------------------------

def analyze_branch(system: Optional[PolySystem], bal: Balance, order: Optional[int] = None,
                   *, symbolic: bool = False) -> BranchReport:
    if bal.system is None:
        bal = replace(bal, system=system)
    elif system is not None and system != bal.system:
        raise ValueError("balance belongs to a different system")
    res = resonances(bal)
    char = characteristic_polynomial(bal)
    dim = bal.dimension
    table = new_table(bal)
    nonneg = [r for r in res if r.rationality != Rationality.NEGATIVE]
    notes: List[str] = []

    if any(r.rationality == Rationality.IRRATIONAL for r in nonneg):
        notes.append("irrational resonance: no expansion in rational powers of t")
        count = 1 + len(bal.free_leading)
        return BranchReport(bal, res, table, count, dim, Status.IRRATIONAL_RESONANCE, 0, char, notes)

    steps = sorted({r.step for r in nonneg if r.step is not None})
    off_grid = [r for r in nonneg if r.step is None]
    if off_grid:
        raise ValueError(f"resonance {off_grid[0].nu_str} is not on the 1/{bal.Q} grid")
    top = max(steps, default=0)
    if order is None:
        order = default_order(bal, res)
    if order < top:
        raise ValueError(f"order {order} is below the largest resonance step {top}")

    if 0 in steps:
        elim = eliminate(Recursion(bal).matrix(0), [0] * dim)
        table.events[0] = (elim.kernel_dim, True)

    rec = Recursion(bal)
    for i in range(1, order + 1):
        advance(bal, table, i, symbolic=symbolic, recursion=rec)
        if table.halted_at is not None:
            break

    for r in res:
        if r.step is not None and r.step in table.events:
            r.kernel_dim, r.compatible = table.events[r.step]
            if r.step > 0:
                X = rec.matrix(r.step)
                r.samples = 0 if symbolic else sample_count(X, [0] * dim) or None

    if table.halted_at is not None:
        status = Status.INCOMPATIBLE
        count = 1 + sum(k for st, (k, ok) in table.events.items() if ok)
        notes.append(f"compatibility fails at step {table.halted_at}")
    else:
        count = 1 + sum(k for st, (k, ok) in table.events.items() if ok)
        status = Status.FULL_FAMILY if count == dim else Status.PARTIAL_FAMILY
        if status == Status.PARTIAL_FAMILY:
            notes.append(f"{count} free parameters of {dim}: not the general solution")
    return BranchReport(bal, res, table, count, dim, status, order, char, notes)


def _branches_for(system_id, q_policy="minimal", max_den=2, exp_min=-1, system=None):
    if isinstance(system_id, (Steady, Expanding)):
        return closed_form_balances(system_id, q_policy=q_policy)
    return list(generic_balances(system, max_den=max_den, exp_min=exp_min))


def _verdict(branches: List[BranchReport]) -> Verdict:
    reasons = []
    for b in branches:
        nus = ", ".join(r.nu_str for r in b.nonnegative_resonances) or "none"
        reasons.append(f"{b.label}: {b.status.value}, {b.free_param_count} of {b.max_params} "
                       f"free parameters, nonnegative resonances nu = {nus}")
    full = [b for b in branches if b.status == Status.FULL_FAMILY]
    if any(b.meromorphic for b in full):
        kind = VerdictKind.STRONG
    elif full:
        kind = VerdictKind.WEAK
    else:
        kind = VerdictKind.FAIL
    return Verdict(kind, reasons)


def analyze_system(target: Union[SystemId, PolySystem], order: Optional[int] = None, *,
                   minimal_order: bool = False, symbolic: bool = False, q_policy: str = "minimal",
                   max_den: int = 2, exp_min=-1) -> SystemReport:
    """Analyse every branch of a builtin or custom system.

    ``minimal_order=True`` stops each branch at its largest resonance step,
    which is all the classification needs.
    """
    if isinstance(target, PolySystem):
        system = target
        sid = target.system_id if isinstance(target.system_id, (Steady, Expanding)) else Custom()
        if isinstance(sid, (Steady, Expanding)) and builtin(sid) != system:
            sid = Custom()
    else:
        sid = target
        system = builtin(sid)
    notes = balance_notes(sid) if isinstance(sid, (Steady, Expanding)) else []
    bals = _branches_for(sid, q_policy, max_den, exp_min, system)
    if not isinstance(sid, (Steady, Expanding)):
        unsup = getattr(bals, "unsupported", [])
        notes.extend(f"candidate exponents {tuple(str(x) for x in u['exponents'])}: "
                     f"{u['reason']} ({u['detail']})" for u in unsup)
    reports = []
    for bal in bals:
        o = order
        if minimal_order:
            res = resonances(bal)
            o = max([r.step for r in res if r.step is not None] + [0])
        try:
            reports.append(analyze_branch(system, bal, o, symbolic=symbolic))
        except UnsupportedAlgebra as exc:
            notes.append(f"{bal.label}: unsupported-algebra ({exc})")
    reports.sort(key=lambda b: b.label)
    return SystemReport(system, sid, reports, _verdict(reports), notes)


def classify(system_id: Union[SystemId, PolySystem], *, symbolic: bool = False) -> Verdict:
    return analyze_system(system_id, minimal_order=True, symbolic=symbolic).verdict
