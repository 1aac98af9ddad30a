"""Steady systems: resonances of the perfect squares and the strong set up to 200."""

from painlevekit.painleve import analyze_system
from painlevekit.odeparse import Steady
from painlevekit.report import factored_det, scan, scan_markdown

for n in (1, 4, 9, 16, 2):
    rep = analyze_system(Steady(n))
    print(f"n = {n}: {rep.verdict.kind.value}")
    for b in rep.branches:
        print(f"  {b.label:8s} det X(nu) = {factored_det(b):40s} {b.status.value}")

rows = scan("steady", 1, 200)
print("strong:", [r.n for r in rows if r.verdict == "strong"])
print("weak:  ", [r.n for r in rows if r.verdict == "weak"])
print(scan_markdown(rows[:9]))
