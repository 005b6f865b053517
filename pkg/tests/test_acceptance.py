"""The ten acceptance criteria at their stated tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line, repeated in the terminal summary.
The laws criterion checks the syntactic category exhaustively and takes a few
minutes, as does the soundness criterion.
"""

import pytest

from yaqbench.acceptance import SUITES
from yaqbench.schemas import validate

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("suite", list(SUITES))
def test_criterion(suite):
    r = SUITES[suite]()
    line = r.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    validate("corpus", {"all_pass": r.passed, "criteria": [r.to_json()]})
    assert r.checked > 0
    assert r.passed, "\n".join(map(str, r.failures[:10]))
