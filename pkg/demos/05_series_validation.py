"""Puiseux series against numerical integration, and conservation for n = 1."""

from painlevekit.odeparse import Steady, builtin
from painlevekit.painleve import analyze_system
from painlevekit.series import default_params, materialize, radius_estimate
from painlevekit.validate import conserved_check, series_vs_integration

# n = 16 steps in fifths and thirds, so 40 steps reach only t^7 and t^12;
# its deviation stays around 1e-5
for n in (4, 9, 16):
    rep = analyze_system(Steady(n), 40)
    for b in rep.branches:
        for s in (0, 1):
            series = materialize(b, default_params(b, s), 40)
            r = radius_estimate(series)
            window = (0.05, 0.1) if r >= 0.2 else (r / 4, r / 2)
            dev = series_vs_integration(builtin(Steady(n)), series, *window, 1e-12)
            print(f"n = {n:2d} {b.label:6s} s = {s}  radius ~ {r:.3f}  "
                  f"window [{window[0]:.3f}, {window[1]:.3f}]  deviation {dev:.2e}")

rep = conserved_check(Steady(1), interval=(0, 1))
print("n = 1: sum of right-hand sides =", rep.symbolic_sum, f" drift {rep.drift:.1e}")
print("n = 4: sum of right-hand sides =", conserved_check(Steady(4)).symbolic_sum)
