"""Acceptance gate: all ten end-to-end criteria at full production size.

Each criterion prints its one-line verdict even under pytest's capture, so
the run log always carries the complete scoreboard. Two criteria are known
to fail and are left failing deliberately; their detail strings explain the
mathematical reason, and the module docstring of nedpca.acceptance carries
the full analysis. Set NEDPCA_ACCEPTANCE_LEVEL=quick to run the reduced
sweeps instead (for example on a laptop).
"""

import os

import pytest

from nedpca.acceptance import run_level

LEVEL = os.environ.get("NEDPCA_ACCEPTANCE_LEVEL", "full")


@pytest.fixture(scope="module")
def results():
    return run_level(LEVEL)


@pytest.mark.parametrize("index", range(1, 11))
def test_criterion(index, results, capsys):
    res = results[index - 1]
    with capsys.disabled():
        print()
        print(res.line())
    assert res.passed, res.detail
