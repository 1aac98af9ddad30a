import pytest

# filled by test_acceptance.py, one entry per criterion
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, desc, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {desc} ({detail})")


@pytest.fixture
def criterion(request):
    """Record a criterion's outcome; calls ``check(k, desc)`` then fills ``detail``."""
    state = {}

    def check(k, desc):
        state["k"], state["desc"], state["detail"] = k, desc, ""
        return state

    yield check
    if "k" in state:
        failed = getattr(request.node, "rep_call", None)
        ok = failed is not None and failed.passed
        ACCEPTANCE[state["k"]] = (ok, state["desc"], state["detail"])
        print(f"{'PASS' if ok else 'FAIL'} criterion {state['k']}: {state['desc']}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
