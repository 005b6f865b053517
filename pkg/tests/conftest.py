import os

from hypothesis import HealthCheck, settings, strategies as st

from yaqbench.syntax import UNIT, Arrow, Bang, TConst, Tensor

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


def types(consts=("a", "b"), max_leaves=6):
    """Random types over ``consts`` and ``top``."""
    leaf = st.sampled_from([TConst(c) for c in consts] + [UNIT])
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            inner.map(Bang),
            st.tuples(inner, inner).map(lambda p: Arrow(*p)),
            st.tuples(inner, inner).map(lambda p: Tensor(*p)),
        ),
        max_leaves=max_leaves,
    )


# one line per acceptance criterion, repeated after the run so it survives output capture
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
