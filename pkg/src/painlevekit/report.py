"""JSON and Markdown reports, dimension scans and the resonance table."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactnum import QuadElem, as_fraction, exact_str, fraction_str, to_json
from .odeparse import Expanding, Steady, SystemId, format_system
from .painleve import BranchReport, Rationality, SystemReport, analyze_system

__all__ = [
    "system_json",
    "report_json",
    "report_markdown",
    "factored_det",
    "ScanRow",
    "scan_row",
    "scan",
    "scan_json",
    "scan_csv",
    "scan_markdown",
    "resonance_table",
]


def _sid_fields(sid: SystemId) -> dict:
    out = {"kind": sid.kind, "n": None, "lambda": None}
    if isinstance(sid, (Steady, Expanding)):
        out["n"] = sid.n
    if isinstance(sid, Expanding):
        out["lambda"] = fraction_str(as_fraction(sid.lam))
    return out


def system_json(report: SystemReport) -> dict:
    sysm = report.system
    d = _sid_fields(report.system_id)
    d["variables"] = list(sysm.variables)
    d["text"] = format_system(sysm)
    return d


def _nu_factor(r) -> str:
    x = r.nu
    if isinstance(x, QuadElem):
        x = x.a if x.is_rational() else None
    if x is None:
        return f"(nu - ({r.nu_str}))"
    v = as_fraction(x)
    if v == 0:
        return "nu"
    op = "-" if v > 0 else "+"
    return f"(nu {op} {fraction_str(abs(v))})"


def factored_det(branch: BranchReport) -> str:
    """``det X(nu)`` as a product of linear factors over its resonances."""
    coeffs = branch.char_poly
    if not coeffs:
        return ""
    lead = coeffs[-1]
    parts = []
    if lead != 1:
        parts.append(exact_str(lead))
    for r in sorted(branch.resonances, key=lambda r: (r.approx, r.nu_str)):
        if r.nu is None:
            return _poly_str(coeffs)
        f = _nu_factor(r)
        parts.append(f if r.multiplicity == 1 else f"{f}^{r.multiplicity}")
    return "*".join(parts)


def _poly_str(coeffs) -> str:
    from .polys import Poly

    nu = Poly.symbol("nu")
    acc = Poly()
    for k, c in enumerate(coeffs):
        acc = acc + Poly.const(c) * nu ** k
    return str(acc)


def _resonance_json(r) -> dict:
    return {
        "nu": to_json(r.nu) if r.nu is not None else None,
        "nu_str": r.nu_str,
        "approx": float(f"{r.approx:.15g}"),
        "multiplicity": r.multiplicity,
        "step": r.step,
        "class": r.rationality.value,
        "kernel_dim": r.kernel_dim,
        "compatible": r.compatible,
        "samples": r.samples,
    }


def branch_json(b: BranchReport) -> dict:
    bal = b.balance
    table = b.coeffs
    return {
        "label": b.label,
        "exponents": [fraction_str(e) for e in bal.exponents],
        "leading_coeffs": [to_json(c) for c in bal.leading_coeffs],
        "leading_coeffs_str": [exact_str(c) for c in bal.leading_coeffs],
        "Q": bal.Q,
        "offsets": list(bal.offsets),
        "free_leading": sorted(bal.free_leading),
        "status": b.status.value,
        "free_param_count": b.free_param_count,
        "max_params": b.max_params,
        "order": b.order,
        "det_X": factored_det(b),
        "resonances": [_resonance_json(r) for r in b.resonances],
        "parameters": [{"name": p, "step": st} for p, st in table.params],
        "halted_at": table.halted_at,
        "coefficients": {v: [str(c) for c in col] for v, col in zip(table.variables, table.coeffs)},
        "notes": list(b.notes),
    }


def report_json(report: SystemReport) -> dict:
    out = {"system": system_json(report)}
    out.update(_sid_fields(report.system_id))
    out.update({
        "verdict": report.verdict.kind.value,
        "reasons": list(report.verdict.reasons),
        "notes": list(report.notes),
        "branches": [branch_json(b) for b in report.branches],
        "validation": list(report.validation),
    })
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def report_markdown(report: SystemReport) -> str:
    sid = report.system_id
    title = {"steady": "Steady system", "expanding": "Expanding system"}.get(sid.kind, "System")
    head = _sid_fields(sid)
    bits = [f"n = {head['n']}"] if head["n"] is not None else []
    if head["lambda"] is not None:
        bits.append(f"lambda = {head['lambda']}")
    lines = [f"# {title}" + (f" ({', '.join(bits)})" if bits else ""), "", "```",
             format_system(report.system).rstrip(), "```", "",
             f"**Verdict:** {report.verdict.kind.value}", ""]
    lines += [f"- {r}" for r in report.verdict.reasons]
    if report.notes:
        lines += ["", "Notes:", ""] + [f"- {n}" for n in report.notes]
    for b in report.branches:
        bal = b.balance
        lines += ["", f"## Branch `{b.label}`", "",
                  f"- exponents: {', '.join(fraction_str(e) for e in bal.exponents)}",
                  f"- leading coefficients: {', '.join(exact_str(c) for c in bal.leading_coeffs)}",
                  f"- Q = {bal.Q}, offsets = {list(bal.offsets)}",
                  f"- det X(nu) = {factored_det(b)}",
                  f"- status: {b.status.value} ({b.free_param_count} of {b.max_params} free parameters)",
                  "", "| nu | class | step | kernel dim | compatible |", "|---|---|---|---|---|"]
        for r in b.resonances:
            lines.append(f"| {r.nu_str} | {r.rationality.value} | {_cell(r.step)} | "
                         f"{_cell(r.kernel_dim)} | {_cell(r.compatible)} |")
        if b.notes:
            lines += [""] + [f"- {n}" for n in b.notes]
    if report.validation:
        lines += ["", "## Validation", "", "| branch | window | order | deviation | conserved |",
                  "|---|---|---|---|---|"]
        for v in report.validation:
            w = v["window"]
            lines.append(f"| {v['branch']} | [{w[0]:.6g}, {w[1]:.6g}] | {v['order']} | "
                         f"{v['deviation']:.3e} | {_cell(v.get('conserved'))} |")
    return "\n".join(lines) + "\n"


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "yes" if x else "no"
    return str(x)


# -- scans ---------------------------------------------------------------------------

@dataclass
class ScanRow:
    n: int
    verdict: str
    lam: Optional[str] = None
    # (label, exponents, leading coefficients, nonnegative nu strings, status)
    branches: List[Tuple[str, Tuple[str, ...], Tuple[str, ...], Tuple[str, ...], str]] = \
        field(default_factory=list)

    def branch(self, label):
        for b in self.branches:
            if b[0] == label:
                return b
        raise KeyError(label)


def _make_id(kind: str, n: int, lam) -> SystemId:
    if kind == "steady":
        return Steady(n)
    if kind == "expanding":
        return Expanding(n, as_fraction(lam))
    raise ValueError(f"unknown system kind {kind!r}")


def scan_row(kind: str, n: int, lam="1") -> ScanRow:
    sid = _make_id(kind, n, lam)
    rep = analyze_system(sid, minimal_order=True)
    row = ScanRow(n, rep.verdict.kind.value,
                  fraction_str(as_fraction(lam)) if kind == "expanding" else None)
    for b in rep.branches:
        row.branches.append((b.label, tuple(fraction_str(e) for e in b.balance.exponents),
                             tuple(exact_str(c) for c in b.balance.leading_coeffs),
                             tuple(r.nu_str for r in b.nonnegative_resonances), b.status.value))
    return row


def _threads() -> int:
    env = os.environ.get("PAINLEVE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"PAINLEVE_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def _row_task(args):
    return scan_row(*args)


def scan(kind: str, n_min: int, n_max: int, lam="1", threads: Optional[int] = None) -> List[ScanRow]:
    """One row per ``n`` in ``[n_min, n_max]``, in order of ``n``."""
    if n_min < 1 or n_max < n_min:
        raise ValueError(f"empty or invalid range [{n_min}, {n_max}]")
    jobs = [(kind, n, lam) for n in range(n_min, n_max + 1)]
    workers = min(threads or _threads(), len(jobs))
    if workers <= 1:
        return [_row_task(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row_task, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def scan_json(rows: Sequence[ScanRow]) -> list:
    return [{"n": r.n, "lambda": r.lam, "verdict": r.verdict,
             "branches": [{"label": b[0], "exponents": list(b[1]), "leading_coeffs": list(b[2]),
                           "nu": list(b[3]), "status": b[4]} for b in r.branches]}
            for r in rows]


def scan_csv(rows: Sequence[ScanRow]) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "lambda", "verdict", "branch", "status", "nu"])
    for r in rows:
        for b in r.branches:
            w.writerow([r.n, r.lam or "", r.verdict, b[0], b[4], ";".join(b[3])])
    return buf.getvalue()


def resonance_table(rows: Sequence[ScanRow]) -> List[Tuple[str, ...]]:
    """``(n, a+, b+, nu+, a-, b-, nu-)`` for the steady rows passing the strong test."""
    out = []
    for r in rows:
        if r.lam is not None or r.verdict != "strong":
            continue
        cells = [str(r.n)]
        for label in ("plus", "minus"):
            try:
                b = r.branch(label)
            except KeyError:
                cells += ["", "", ""]
                continue
            top = b[3][-1] if b[3] else ""
            cells += [b[2][0], b[2][1], top]
        out.append(tuple(cells))
    return out


def scan_markdown(rows: Sequence[ScanRow]) -> str:
    lines = ["| n | verdict | branches |", "|---|---|---|"]
    for r in rows:
        desc = "; ".join(f"{b[0]}: {b[4]} (nu = {', '.join(b[3]) or 'none'})" for b in r.branches)
        lines.append(f"| {r.n} | {r.verdict} | {desc} |")
    table = resonance_table(rows)
    if table:
        lines += ["", "| n | a+ | b+ | i | a- | b- | i |", "|---|---|---|---|---|---|---|"]
        lines += ["| " + " | ".join(t) + " |" for t in table]
    return "\n".join(lines) + "\n"
