"""Expanding systems fail: a missing parameter for n = 1, incompatibility for squares."""

from fractions import Fraction

from painlevekit.odeparse import Expanding
from painlevekit.painleve import analyze_system

rep = analyze_system(Expanding(1))
eq = rep.branch("equal+")
print("n = 1, equal+:", eq.status.value, f"{eq.free_param_count} of {eq.max_params} parameters")
for r in eq.resonances:
    print(f"  nu = {r.nu_str:6s} step {r.step}  kernel {r.kernel_dim}  compatible {r.compatible}")

for n in (4, 9, 16):
    rep = analyze_system(Expanding(n, Fraction(1, 2)), minimal_order=True)
    for b in rep.branches:
        if b.label.startswith("mixed"):
            print(f"n = {n}, {b.label}: {b.status.value} at step {b.coeffs.halted_at}")
