"""Autonomous polynomial ODE systems: text grammar, canonical form, builtins.

File format (UTF-8, line oriented)::

    vars: x, y
    params: n=4
    x' = x^2 - x*y + (n-1)
    y' = x*y - n*x^2

Parameters are substituted as exact rationals while parsing, so a
:class:`PolySystem` only ever carries numeric coefficients.  ``#`` starts
a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .exactnum import as_fraction, exact_str, fraction_str, parse_fraction

__all__ = [
    "Steady",
    "Expanding",
    "Custom",
    "SystemId",
    "PolySystem",
    "ParseError",
    "parse_system",
    "format_system",
    "builtin",
    "jacobian_at",
    "evaluate_rhs",
    "sum_of_rhs",
]

Exponents = Tuple[int, ...]
Term = Tuple[Fraction, Exponents]


# -- system identifiers ------------------------------------------------------

@dataclass(frozen=True)
class Steady:
    n: int

    kind = "steady"


@dataclass(frozen=True)
class Expanding:
    n: int
    lam: Fraction = Fraction(1)

    kind = "expanding"


@dataclass(frozen=True)
class Custom:
    name: str = "custom"

    kind = "custom"


SystemId = Union[Steady, Expanding, Custom]


# -- canonical polynomial systems ----------------------------------------------

def _glex_key(exps: Exponents):
    return (-sum(exps), tuple(-e for e in exps))


def _canonical(poly: Dict[Exponents, Fraction]) -> Tuple[Term, ...]:
    return tuple((c, e) for e, c in sorted(poly.items(), key=lambda kv: _glex_key(kv[0])) if c)


@dataclass(frozen=True)
class PolySystem:
    """Right-hand sides ``x_v' = sum coef * prod x_u**k_u`` in graded lex order."""

    variables: Tuple[str, ...]
    equations: Tuple[Tuple[Term, ...], ...]
    parameters: Tuple[Tuple[str, Fraction], ...] = ()
    system_id: Optional[SystemId] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.equations) != len(self.variables):
            raise ValueError("one equation per variable is required")
        for eq in self.equations:
            for c, e in eq:
                if len(e) != len(self.variables):
                    raise ValueError("exponent vector length must equal the dimension")
                if not c:
                    raise ValueError("zero coefficient in canonical system")

    @classmethod
    def from_dicts(cls, variables, polys, parameters=(), system_id=None) -> "PolySystem":
        eqs = tuple(_canonical({tuple(k): as_fraction(v) for k, v in p.items()}) for p in polys)
        return cls(tuple(variables), eqs, tuple(parameters), system_id)

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @property
    def params(self) -> Dict[str, Fraction]:
        return dict(self.parameters)

    def as_dicts(self) -> List[Dict[Exponents, Fraction]]:
        return [{e: c for c, e in eq} for eq in self.equations]

    def evaluate(self, point: Sequence) -> list:
        return evaluate_rhs(self, point)

    def __str__(self):
        return format_system(self)


def _monomial_value(exps: Exponents, point):
    val = 1
    for x, k in zip(point, exps):
        if k:
            val = val * (x ** k if k > 1 else x)
    return val


def evaluate_rhs(system: PolySystem, point: Sequence) -> list:
    """Exact (or float) evaluation of every right-hand side at ``point``."""
    if len(point) != system.dimension:
        raise ValueError("point length must equal the system dimension")
    out = []
    for eq in system.equations:
        acc = 0
        for c, e in eq:
            acc = acc + c * _monomial_value(e, point)
        out.append(acc)
    return out


def jacobian_at(system: PolySystem, point: Sequence) -> List[list]:
    """Exact Jacobian ``dF_v/dx_u`` of the right-hand side at ``point``."""
    dim = system.dimension
    if len(point) != dim:
        raise ValueError("point length must equal the system dimension")
    jac = []
    for eq in system.equations:
        row = []
        for u in range(dim):
            acc = 0
            for c, e in eq:
                k = e[u]
                if not k:
                    continue
                de = e[:u] + (k - 1,) + e[u + 1:]
                acc = acc + (c * k) * _monomial_value(de, point)
            row.append(acc)
        jac.append(row)
    return jac


def sum_of_rhs(system: PolySystem) -> Dict[Exponents, Fraction]:
    """Canonical polynomial ``sum_v F_v`` (zero coefficients dropped)."""
    acc: Dict[Exponents, Fraction] = {}
    for eq in system.equations:
        for c, e in eq:
            acc[e] = acc.get(e, Fraction(0)) + c
    return {e: c for e, c in acc.items() if c}


# -- builtins ----------------------------------------------------------------

def builtin(system_id: SystemId) -> PolySystem:
    """The steady or expanding soliton system with ``n`` and ``lambda`` substituted."""
    if isinstance(system_id, Steady):
        n = system_id.n
        if not isinstance(n, int) or n < 1:
            raise ValueError("n must be an integer >= 1")
        fx = {(2, 0): 1, (1, 1): -1, (0, 0): n - 1}
        fy = {(1, 1): 1, (2, 0): -n}
        return PolySystem.from_dicts(("x", "y"), (fx, fy), (("n", Fraction(n)),), system_id)
    if isinstance(system_id, Expanding):
        n = system_id.n
        lam = as_fraction(system_id.lam)
        if not isinstance(n, int) or n < 1:
            raise ValueError("n must be an integer >= 1")
        if lam <= 0:
            raise ValueError("lambda must be positive for the expanding system")
        fx = {(2, 0, 0): 1, (1, 1, 0): -1, (0, 0, 2): lam, (0, 0, 0): n - 1}
        fy = {(1, 1, 0): 1, (2, 0, 0): -n, (0, 0, 2): lam}
        fz = {(1, 0, 1): 1}
        return PolySystem.from_dicts(("x", "y", "z"), (fx, fy, fz),
                                     (("n", Fraction(n)), ("lambda", lam)), system_id)
    raise ValueError(f"no builtin system for {system_id!r}")


# -- printing ----------------------------------------------------------------

def _term_str(c: Fraction, e: Exponents, names) -> Tuple[str, str]:
    factors = []
    for name, k in zip(names, e):
        if k == 1:
            factors.append(name)
        elif k > 1:
            factors.append(f"{name}^{k}")
    mag = abs(c)
    sgn = "-" if c < 0 else "+"
    if not factors:
        return sgn, fraction_str(mag)
    mono = "*".join(factors)
    if mag == 1:
        return sgn, mono
    ms = fraction_str(mag)
    if mag.denominator != 1:
        ms = f"({ms})"
    return sgn, f"{ms}*{mono}"


def format_system(system: PolySystem) -> str:
    lines = ["vars: " + ", ".join(system.variables)]
    if system.parameters:
        lines.append("params: " + ", ".join(f"{k}={fraction_str(v)}" for k, v in system.parameters))
    for name, eq in zip(system.variables, system.equations):
        if not eq:
            rhs = "0"
        else:
            pieces = []
            for idx, (c, e) in enumerate(eq):
                sgn, body = _term_str(c, e, system.variables)
                if idx == 0:
                    pieces.append(body if sgn == "+" else f"-{body}")
                else:
                    pieces.append(f"{sgn} {body}")
            rhs = " ".join(pieces)
        lines.append(f"{name}' = {rhs}")
    return "\n".join(lines) + "\n"


# -- parsing -----------------------------------------------------------------

class ParseError(ValueError):
    """Parse failure with a 1-based source position.

    ``kind`` is one of ``"syntax"``, ``"unknown-variable"``,
    ``"non-polynomial"``, ``"unbound-parameter"``.  ``str(err)`` is
    ``"line L, col C: <reason>"``.
    """

    def __init__(self, line: int, col: int, reason: str, kind: str = "syntax"):
        self.line = line
        self.col = col
        self.reason = reason
        self.kind = kind
        super().__init__(f"line {line}, col {col}: {reason}")


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass
class _Tok:
    kind: str  # "num", "ident", "op", "end"
    text: str
    col: int


def _tokenize(src: str, line: int, col0: int) -> List[_Tok]:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m or m.end() == pos:
            break
        if m.group(1) is not None:
            toks.append(_Tok("num", m.group(1), col0 + m.start(1)))
        elif m.group(2) is not None:
            toks.append(_Tok("ident", m.group(2), col0 + m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(line, col0 + m.start(3), f"unexpected character {ch!r}")
            toks.append(_Tok("op", ch, col0 + m.start(3)))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(src.rstrip())))
    return toks


# AST nodes: ("num", Fraction), ("id", name), ("neg", a), ("bin", op, a, b), ("pow", a, k)

_BINARY = {"+": (1, "left"), "-": (1, "left"), "*": (3, "left"), "/": (3, "left"), "^": (4, "right")}
_UNARY_PREC = 2


class _ExprParser:
    """Precedence climbing over one right-hand side."""

    def __init__(self, toks: List[_Tok], line: int):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, tok: _Tok, reason: str, kind: str = "syntax"):
        raise ParseError(self.line, tok.col, reason, kind)

    def parse(self):
        node = self.expr(0)
        tok = self.peek()
        if tok.kind != "end":
            self.error(tok, f"unexpected {tok.text!r}")
        return node

    def expr(self, min_prec: int):
        lhs = self.unary()
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.text not in _BINARY:
                return lhs
            prec, assoc = _BINARY[tok.text]
            if prec < min_prec:
                return lhs
            self.take()
            if tok.text == "^":
                lhs = ("pow", lhs, self.exponent(tok), tok.col)
                continue
            rhs = self.expr(prec + 1 if assoc == "left" else prec)
            lhs = ("bin", tok.text, lhs, rhs, tok.col)

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.take()
            operand = self.expr(_UNARY_PREC + 1)
            return operand if tok.text == "+" else ("neg", operand)
        return self.atom()

    def exponent(self, caret: _Tok) -> int:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.error(tok, "non-polynomial construct: negative power", "non-polynomial")
        if tok.kind == "op" and tok.text == "(":
            self.error(tok, "non-polynomial construct: fractional or symbolic power",
                       "non-polynomial")
        if tok.kind != "num":
            self.error(tok if tok.kind != "end" else caret,
                       "expected an unsigned integer exponent after '^'",
                       "non-polynomial" if tok.kind == "ident" else "syntax")
        self.take()
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "/" and self.toks[self.i + 1].kind == "num":
            self.error(nxt, "non-polynomial construct: fractional power", "non-polynomial")
        return int(tok.text)

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return ("num", Fraction(int(tok.text)), tok.col)
        if tok.kind == "ident":
            return ("id", tok.text, tok.col)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr(0)
            close = self.take()
            if close.kind != "op" or close.text != ")":
                self.error(close, "expected ')'")
            return node
        if tok.kind == "end":
            self.error(tok, "unexpected end of expression")
        self.error(tok, f"unexpected {tok.text!r}")


def _identifiers(node):
    tag = node[0]
    if tag == "id":
        yield node
    elif tag == "neg":
        yield from _identifiers(node[1])
    elif tag == "bin":
        yield from _identifiers(node[2])
        yield from _identifiers(node[3])
    elif tag == "pow":
        yield from _identifiers(node[1])


def _padd(p, q):
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, Fraction(0)) + c
    return {e: c for e, c in out.items() if c}


def _pmul(p, q):
    out: Dict[Exponents, Fraction] = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _evaluate(node, variables, params, line):
    dim = len(variables)
    zero = (0,) * dim
    tag = node[0]
    if tag == "num":
        return {zero: node[1]} if node[1] else {}
    if tag == "id":
        name, col = node[1], node[2]
        if name in variables:
            e = [0] * dim
            e[variables.index(name)] = 1
            return {tuple(e): Fraction(1)}
        if name in params:
            v = params[name]
            return {zero: v} if v else {}
        if name == "t":
            raise ParseError(line, col, "explicit t: only autonomous systems are supported",
                             "non-polynomial")
        raise ParseError(line, col, f"unbound parameter {name!r}", "unbound-parameter")
    if tag == "neg":
        return {e: -c for e, c in _evaluate(node[1], variables, params, line).items()}
    if tag == "pow":
        base = _evaluate(node[1], variables, params, line)
        out = {zero: Fraction(1)}
        for _ in range(node[2]):
            out = _pmul(out, base)
        return out
    op, a, b, col = node[1], node[2], node[3], node[4]
    if op == "/":
        for ident in _identifiers(b):
            if ident[1] not in params:
                raise ParseError(line, ident[2],
                                 f"non-polynomial construct: division by {ident[1]!r}",
                                 "non-polynomial")
    pa = _evaluate(a, variables, params, line)
    pb = _evaluate(b, variables, params, line)
    if op == "+":
        return _padd(pa, pb)
    if op == "-":
        return _padd(pa, {e: -c for e, c in pb.items()})
    if op == "*":
        return _pmul(pa, pb)
    divisor = pb.get(zero, Fraction(0))
    if not divisor:
        raise ParseError(line, col, "division by zero")
    return {e: c / divisor for e, c in pa.items()}


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")
_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?$")


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0]


def parse_system(text: str) -> PolySystem:
    """Parse the line-oriented ODE grammar into a canonical :class:`PolySystem`."""
    variables: Optional[List[str]] = None
    params: Dict[str, Fraction] = {}
    param_order: List[str] = []
    equations: List[Tuple[str, str, int, int, int]] = []  # name, rhs, line, name col, rhs col

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip())
        stripped = body.strip()
        if stripped.startswith("vars:"):
            if equations:
                raise ParseError(lineno, indent + 1, "headers must precede equations")
            names = [s.strip() for s in stripped[5:].split(",")]
            col = indent + 6
            for nm in names:
                if not _IDENT.match(nm):
                    raise ParseError(lineno, col, f"invalid variable name {nm!r}")
            if len(set(names)) != len(names):
                raise ParseError(lineno, col, "duplicate variable name")
            variables = names
            continue
        if stripped.startswith("params:"):
            if equations:
                raise ParseError(lineno, indent + 1, "headers must precede equations")
            offset = body.index("params:") + 7
            for chunk in body[offset:].split(","):
                col = offset + len(chunk) - len(chunk.lstrip()) + 1
                offset += len(chunk) + 1
                if "=" not in chunk:
                    raise ParseError(lineno, col, "expected name=rational in params header")
                nm, val = (s.strip() for s in chunk.split("=", 1))
                if not _IDENT.match(nm):
                    raise ParseError(lineno, col, f"invalid parameter name {nm!r}")
                if not _RATIONAL.match(val):
                    raise ParseError(lineno, col, f"parameter {nm!r} needs an exact rational value")
                if nm not in params:
                    param_order.append(nm)
                params[nm] = parse_fraction(val)
            continue
        m = re.match(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*'\s*=", body)
        if not m:
            raise ParseError(lineno, indent + 1, "expected a header or an equation \"v' = expr\"")
        equations.append((m.group(1), body[m.end():], lineno, m.start(1) + 1, m.end() + 1))

    if not equations:
        raise ParseError(max(1, len(text.splitlines())), 1, "no equations found")
    lhs_names = [e[0] for e in equations]
    if variables is None:
        variables = []
        for nm in lhs_names:
            if nm not in variables:
                variables.append(nm)
    for nm, _, line, col, _ in equations:
        if nm not in variables:
            raise ParseError(line, col, f"unknown variable {nm!r}", "unknown-variable")
    seen = set()
    for nm, _, line, col, _ in equations:
        if nm in seen:
            raise ParseError(line, col, f"duplicate equation for {nm!r}")
        seen.add(nm)
    missing = [v for v in variables if v not in seen]
    if missing:
        raise ParseError(equations[-1][2], 1, f"no equation for variable(s) {', '.join(missing)}")
    clash = [p for p in params if p in variables]
    if clash:
        raise ParseError(1, 1, f"parameter name shadows a variable: {clash[0]!r}")

    polys: Dict[str, Dict[Exponents, Fraction]] = {}
    for nm, rhs, line, _, rcol in equations:
        toks = _tokenize(rhs, line, rcol)
        ast = _ExprParser(toks, line).parse()
        polys[nm] = _evaluate(ast, variables, params, line)

    return PolySystem.from_dicts(variables, [polys[v] for v in variables],
                                 tuple((p, params[p]) for p in param_order), Custom())
