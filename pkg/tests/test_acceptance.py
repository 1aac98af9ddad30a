"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the terminal summary.
"""

import math
import time
from fractions import Fraction as F

import mpmath
import pytest

from oracles import compare_with_engine
from painlevekit.balance import closed_form_balances
from painlevekit.exactnum import is_perfect_square, n2_plus_8n_is_square
from painlevekit.odeparse import Expanding, Steady, builtin
from painlevekit.painleve import Status, analyze_system
from painlevekit.report import resonance_table, scan, scan_row
from painlevekit.series import default_params, evaluate, materialize
from painlevekit.validate import conserved_check, integrate, series_vs_integration

SQUARES = {k * k for k in range(1, 15)}


@pytest.fixture(scope="module")
def steady_scan():
    t0 = time.perf_counter()
    rows = scan("steady", 1, 200)
    return rows, time.perf_counter() - t0


def test_criterion_1_resonance_table(criterion):
    st = criterion(1, "leading coefficients and resonances for n = 1, 4, 9, under 1 s")
    t0 = time.perf_counter()
    rows = [scan_row("steady", n) for n in (1, 4, 9)]
    elapsed = time.perf_counter() - t0
    st["detail"] = f"{elapsed:.3f} s"
    assert resonance_table(rows) == [
        ("1", "-1/2", "1/2", "1", "", "", ""),
        ("4", "-1/3", "2/3", "4/3", "1", "2", "4"),
        ("9", "-1/4", "3/4", "3/2", "1/2", "3/2", "3"),
    ]
    assert elapsed < 1.0


def test_criterion_2_strong_set(criterion, steady_scan):
    st = criterion(2, "steady n in [1, 200] strong exactly on {1, 4, 9}, under 30 s")
    rows, elapsed = steady_scan
    st["detail"] = f"{elapsed:.2f} s"
    assert [r.n for r in rows] == list(range(1, 201))
    assert {r.n for r in rows if r.verdict == "strong"} == {1, 4, 9}
    assert elapsed < 30.0


def test_criterion_3_weak_set(criterion, steady_scan):
    st = criterion(3, "steady n in [1, 200] weak or strong exactly on perfect squares")
    rows, _ = steady_scan
    passing = {r.n for r in rows if r.verdict in ("strong", "weak")}
    st["detail"] = f"{len(passing)} passing"
    assert passing == SQUARES


def test_criterion_4_expanding_fails(criterion):
    st = criterion(4, "expanding n in [1, 200], lambda in {1, 1/2} all fail with the expected obstructions")
    for lam in ("1", "1/2"):
        rows = scan("expanding", 1, 200, lam)
        assert [r.verdict for r in rows] == ["fail"] * 200
    for lam in (F(1), F(1, 2)):
        rep = analyze_system(Expanding(1, lam))
        for label in ("equal+", "equal-"):
            b = rep.branch(label)
            (r,) = [r for r in b.resonances if r.step is not None and r.step > 0]
            assert (r.step, r.kernel_dim, r.compatible) == (2, 1, True)
            assert (b.free_param_count, b.max_params) == (2, 3)
            assert b.status == Status.PARTIAL_FAMILY
        checked = 0
        for n in sorted(SQUARES):
            root = is_perfect_square(n)
            rep = analyze_system(Expanding(n, lam), minimal_order=True)
            mixed = [b for b in rep.branches if b.label.startswith("mixed")]
            assert mixed
            for b in mixed:
                assert b.status == Status.INCOMPATIBLE
                assert b.coeffs.halted_at == 2 * root
                checked += 1
    st["detail"] = f"{checked} mixed branches incompatible at step 2 sqrt(n)"


def test_criterion_5_square_discriminant_scan(criterion):
    st = criterion(5, "n <= 10^6 with n^2 + 8n square is {1}, under 5 s")
    t0 = time.perf_counter()
    hits = {n for n in range(1, 10 ** 6 + 1) if n2_plus_8n_is_square(n)}
    elapsed = time.perf_counter() - t0
    st["detail"] = f"{elapsed:.2f} s"
    assert hits == {1}
    assert elapsed < 5.0


ORACLE_SYSTEMS = [Steady(1), Steady(4), Steady(9), Steady(16), Expanding(1, F(1)),
                  Expanding(4, F(1))]


def test_criterion_6_recursion_oracle(criterion):
    st = criterion(6, "generic recursion equals hand recursion for i <= 12")
    count = 0
    for sid in ORACLE_SYSTEMS:
        for policy in ("minimal", "root"):
            for bal in closed_form_balances(sid, q_policy=policy):
                mats, rhss = compare_with_engine(sid, bal, steps=12)
                assert mats == 12 and rhss >= 1
                count += 1
    st["detail"] = f"{count} branch/policy pairs"


def test_criterion_7_series_validity(criterion):
    st = criterion(7, "order-40 series vs integration on [0.05, 0.1] below 1e-8, s = 0 vs 1 apart at t = 0.1")
    worst, closest, count = 0.0, math.inf, 0
    for n in (1, 4, 9):
        sid = Steady(n)
        system = builtin(sid)
        for b in analyze_system(sid, 40).branches:
            if b.status != Status.FULL_FAMILY:
                continue
            series = {s: materialize(b, default_params(b, s), 40) for s in (0, 1)}
            for s in series.values():
                dev = series_vs_integration(system, s, 0.05, 0.1, 1e-12)
                worst = max(worst, dev)
                assert dev < 1e-8, (n, b.label, s.param_values, dev)
                count += 1
            with mpmath.workprec(128):
                a, c = evaluate(series[0], F(1, 10), 128), evaluate(series[1], F(1, 10), 128)
                gap = float(mpmath.sqrt(sum((p - q) ** 2 for p, q in zip(a, c))))
            closest = min(closest, gap)
            assert gap > 1e-4, (n, b.label, gap)
    st["detail"] = f"{count} runs, worst deviation {worst:.2e}, smallest s-gap {closest:.2e}"
    assert count >= 6


def test_criterion_8_conservation(criterion):
    st = criterion(8, "steady n = 1 sum of right-hand sides is zero, drift below 1e-10 over unit time")
    rep = conserved_check(Steady(1), interval=(0.0, 1.0), tol=1e-12)
    assert rep.symbolic_sum == "0" and rep.symbolic_zero
    drifts = [rep.drift]
    for start in ((1.0, 2.0), (-0.5, 1.5), (0.3, 0.7)):
        res = integrate(builtin(Steady(1)), start, 0.0, 1.0, 1e-12)
        drifts.append(abs(float(res.states[-1].sum()) - sum(start)))
    st["detail"] = f"max drift {max(drifts):.1e}"
    assert max(drifts) < 1e-10


def test_criterion_9_weak_vanishing_pattern(criterion):
    st = criterion(9, "steady n = 16 vanishing pattern and parameter step 8 on both branches")
    rep = analyze_system(Steady(16))
    plus, minus = rep.branch("plus"), rep.branch("minus")
    assert (plus.balance.Q, minus.balance.Q) == (5, 3)
    for i in range(1, 8):
        assert not any(plus.coeffs.step_vector(i)), i
    assert any(minus.coeffs.step_vector(6))
    assert not any(minus.coeffs.step_vector(7))
    for b, nu in ((plus, F(8, 5)), (minus, F(8, 3))):
        assert [p[1] for p in b.coeffs.params] == [8]
        top = b.nonnegative_resonances[-1]
        assert (top.nu, top.step, top.compatible) == (nu, 8, True)
    st["detail"] = f"minus step 6 = ({', '.join(str(c) for c in minus.coeffs.step_vector(6))})"
