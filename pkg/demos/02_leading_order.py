"""Dominant balances of the builtin systems and of a custom one."""

from painlevekit.balance import closed_form_balances, generic_balances
from painlevekit.odeparse import Expanding, Steady, parse_system

for sid in (Steady(4), Expanding(4)):
    print(sid)
    for b in closed_form_balances(sid):
        print(f"  {b.label:12s} exponents {[str(e) for e in b.exponents]}  "
              f"coefficients {[str(c) for c in b.leading_coeffs]}  Q = {b.Q}")

duffing = parse_system("vars: x, y\nx' = y\ny' = 2*x^3\n")
for b in generic_balances(duffing, max_den=1, exp_min=-2):
    print("x'' = 2x^3:", [str(e) for e in b.exponents], [str(c) for c in b.leading_coeffs])
