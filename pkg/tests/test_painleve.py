from fractions import Fraction as F

import pytest

from oracles import compare_with_engine
from painlevekit.balance import closed_form_balances
from painlevekit.exactnum import QuadElem
from painlevekit.odeparse import Expanding, Steady, builtin, parse_system
from painlevekit.painleve import (Rationality, Recursion, Status, VerdictKind, advance,
                                  analyze_branch, analyze_system, characteristic_polynomial,
                                  check_compatibility, classify, new_table, recursion_matrix,
                                  resonances)
from painlevekit.polys import Poly

c0 = Poly.symbol("c0")


def _bal(sid, label, q_policy="minimal"):
    for b in closed_form_balances(sid, q_policy=q_policy):
        if b.label == label:
            return b
    raise KeyError(label)


def _const(M):
    return [[x.constant() if isinstance(x, Poly) else x for x in row] for row in M]


# -- recursion matrices ---------------------------------------------------------------

@pytest.mark.parametrize("i", range(0, 6))
def test_matrix_steady_one(i):
    assert _const(recursion_matrix(_bal(Steady(1), "plus"), i)) == [
        [i + F(1, 2), F(-1, 2)], [F(-3, 2), i - F(1, 2)]]


@pytest.mark.parametrize("i", range(0, 6))
def test_matrix_steady_four_minus(i):
    assert _const(recursion_matrix(_bal(Steady(4), "minus"), i)) == [[i - 1, 1], [6, i - 2]]


@pytest.mark.parametrize("i", range(0, 6))
def test_matrix_expanding_equal(i):
    assert _const(recursion_matrix(_bal(Expanding(1), "equal+"), i)) == [
        [i, -1, -2], [-1, i, -2], [-1, 0, i]]


def test_matrix_of_mixed_branch_carries_free_leading_coefficient():
    X = recursion_matrix(_bal(Expanding(4), "mixed-minus"), 4)
    assert X[2][0] == -c0
    assert X[2][2] == 4


# -- resonances -----------------------------------------------------------------------

def _nus(bal):
    return [(r.nu, r.multiplicity, r.rationality) for r in resonances(bal)]


def test_resonances_of_perfect_squares():
    assert _nus(_bal(Steady(1), "plus")) == [(-1, 1, Rationality.NEGATIVE),
                                             (1, 1, Rationality.INTEGER)]
    assert _nus(_bal(Steady(4), "plus")) == [(-1, 1, Rationality.NEGATIVE),
                                             (F(4, 3), 1, Rationality.RATIONAL_NON_INTEGER)]
    assert _nus(_bal(Steady(9), "minus")) == [(-1, 1, Rationality.NEGATIVE),
                                              (3, 1, Rationality.INTEGER)]


def test_steady_two_resonance_is_irrational():
    (neg, nu) = resonances(_bal(Steady(2), "plus"))
    assert neg.nu == -1
    assert nu.rationality == Rationality.IRRATIONAL
    assert nu.nu == QuadElem(4, -2, 2)


def test_expanding_equal_resonances():
    r = resonances(_bal(Expanding(1), "equal+"))
    assert [(x.nu, x.multiplicity) for x in r] == [(-1, 2), (2, 1)]
    # n = 4: n^2 + 8n = 48 is not a square, roots 2 +- 2 sqrt(3)
    r = resonances(_bal(Expanding(4), "equal+"))
    assert r[-1].nu == QuadElem(2, 2, 3) and r[-1].rationality == Rationality.IRRATIONAL
    assert r[0].nu == QuadElem(2, -2, 3) and r[0].rationality == Rationality.NEGATIVE


def test_mixed_resonances():
    for n in (1, 4, 9, 16, 25):
        for label in ("mixed-plus", "mixed-minus"):
            if n == 1 and label == "mixed-minus":
                continue
            bal = _bal(Expanding(n), label)
            steps = [r.step for r in resonances(bal) if r.step is not None]
            root = int(n ** 0.5)
            assert steps == [0, 2 * root]


def test_characteristic_polynomial_leading_coefficient():
    assert characteristic_polynomial(_bal(Steady(4), "minus")) == [-4, -3, 1]


# -- stepping -------------------------------------------------------------------------

def test_advance_steady_four_minus():
    bal = _bal(Steady(4), "minus")
    table = new_table(bal)
    rec = Recursion(bal)
    for i in range(1, 5):
        advance(bal, table, i, recursion=rec)
    s = Poly.symbol("s")
    assert [str(table.at(0, j)) for j in range(5)] == ["1", "0", "0", "0", "s"]
    assert table.step_vector(2) == [0, 3]
    assert table.step_vector(4) == [s, -3 * s]
    assert table.events == {4: (1, True)}
    assert table.params == [("s", 4)]


def test_advance_rejects_out_of_order_step():
    bal = _bal(Steady(4), "minus")
    with pytest.raises(ValueError):
        advance(bal, new_table(bal), 2)


def test_compatibility_examples():
    assert check_compatibility([[0, 0], [0, 1]], [0, 5]) == (True, 1)
    assert check_compatibility([[0, 0], [0, 1]], [1, 0]) == (False, 1)
    assert check_compatibility([[1, 2], [2, 4]], [Poly.symbol("s"), 2 * Poly.symbol("s")]) == (True, 1)


def test_mixed_compatibility_fails_in_both_modes():
    bal = _bal(Expanding(1), "mixed-plus")
    table = new_table(bal)
    rec = Recursion(bal)
    advance(bal, table, 1, recursion=rec)
    X, rhs = rec.matrix(2), rec.rhs(table, 2)
    assert check_compatibility(X, rhs) == (False, 1)
    assert check_compatibility(X, rhs, symbolic=True) == (False, 1)


@pytest.mark.parametrize("sid", [Expanding(1), Expanding(4), Expanding(9, F(1, 2)),
                                 Expanding(16)])
def test_sampled_and_symbolic_agree(sid):
    a = analyze_system(sid, minimal_order=True)
    b = analyze_system(sid, minimal_order=True, symbolic=True)
    assert [(x.label, x.status, x.free_param_count) for x in a.branches] == \
        [(x.label, x.status, x.free_param_count) for x in b.branches]


@pytest.mark.parametrize("sid", [Steady(25), Steady(36), Expanding(9, F(1, 2)), Expanding(16),
                                 Expanding(2), Steady(3)])
@pytest.mark.parametrize("policy", ["minimal", "root"])
def test_engine_matches_hand_recursion_beyond_acceptance_set(sid, policy):
    for bal in closed_form_balances(sid, q_policy=policy):
        mats, rhss = compare_with_engine(sid, bal, steps=12)
        assert mats == 12 and rhss >= 1


# -- branch status and verdicts -------------------------------------------------------

def test_branch_reports():
    rep = analyze_system(Steady(16))
    assert rep.verdict.kind == VerdictKind.WEAK
    for b in rep.branches:
        assert b.status == Status.FULL_FAMILY and not b.meromorphic

    rep = analyze_system(Expanding(1))
    eq = rep.branch("equal+")
    assert eq.status == Status.PARTIAL_FAMILY
    assert (eq.free_param_count, eq.max_params) == (2, 3)
    mixed = rep.branch("mixed-plus")
    assert mixed.status == Status.INCOMPATIBLE and mixed.coeffs.halted_at == 2


def test_unknown_branch_lists_labels():
    rep = analyze_system(Steady(4), minimal_order=True)
    with pytest.raises(KeyError, match="minus"):
        rep.branch("nope")


def test_order_below_top_resonance_rejected():
    bal = _bal(Steady(4), "minus")
    with pytest.raises(ValueError):
        analyze_branch(builtin(Steady(4)), bal, order=3)


@pytest.mark.parametrize("n, verdict", [(1, "strong"), (2, "fail"), (4, "strong"), (9, "strong"),
                                        (16, "weak"), (25, "weak"), (26, "fail")])
def test_classify_steady(n, verdict):
    assert classify(Steady(n)).kind.value == verdict


def test_classify_custom_systems():
    # x'' = 6x^2 (Weierstrass): resonances -1, 6, compatible
    weier = parse_system("x' = y\ny' = 6*x^2")
    rep = analyze_system(weier, exp_min=-3, max_den=1)
    (b,) = rep.branches
    assert [r.nu for r in b.resonances] == [-1, 6]
    assert rep.verdict.kind == VerdictKind.STRONG
    # x'' = 2x^3: resonances -1, 4 on both branches
    duff = analyze_system(parse_system("x' = y\ny' = 2*x^3"), exp_min=-2, max_den=1)
    assert [[r.nu for r in b.resonances] for b in duff.branches] == [[-1, 4], [-1, 4]]
    assert duff.verdict.kind == VerdictKind.STRONG


def test_custom_copy_of_builtin_matches():
    text = "vars: x, y\nparams: n=9\nx' = x^2 - x*y + n - 1\ny' = x*y - n*x^2\n"
    a = analyze_system(parse_system(text), minimal_order=True, max_den=1)
    b = analyze_system(Steady(9), minimal_order=True)
    assert a.verdict.kind == b.verdict.kind == VerdictKind.STRONG
    got = sorted((tuple(x.balance.leading_coeffs), x.balance.Q) for x in a.branches)
    ref = sorted((tuple(x.balance.leading_coeffs), x.balance.Q) for x in b.branches)
    assert got == ref
