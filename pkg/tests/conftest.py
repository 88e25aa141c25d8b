from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from scissors.scalars import Scalar

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

RADICANDS = (1, 2, 3, 5, 6)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def scalars(draw, radicands=RADICANDS, max_terms=3):
    chosen = draw(st.lists(st.sampled_from(radicands), max_size=max_terms, unique=True))
    return Scalar({r: draw(fractions) for r in chosen})


def F(a, b=1):
    return Fraction(a, b)


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for key in ("passed", "failed")
        for report in terminalreporter.stats.get(key, [])
        if report.when == "call"
        for name, value in report.user_properties
        if name == "criterion"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
