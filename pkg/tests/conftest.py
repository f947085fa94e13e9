from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from latticefock.exact_scalar import ExactScalar

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

small_fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def exact_scalars(draw, max_terms: int = 3) -> ExactScalar:
    n = draw(st.integers(0, max_terms))
    terms = [(draw(st.integers(-2, 2)), draw(small_fracs), draw(small_fracs)) for _ in range(n)]
    return ExactScalar(terms)


def frac(a, b=1) -> Fraction:
    return Fraction(a, b)


# acceptance criteria record their verdicts here; printed at the end of the run
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {line}")
