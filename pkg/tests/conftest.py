import os
import sys

from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_FACTORS = st.lists(st.integers(2, 9), min_size=1, max_size=2).map(tuple)
CRITERION_GROUPS = [(2,), (3,), (4,), (2, 2), (8,), (9,), (2, 4)]

# criterion number -> (status, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = ("PASS" if ok else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.rstrip("ab")), k)):
        status, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {status}  {detail}")
