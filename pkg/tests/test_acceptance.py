"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one pass/fail line.  A8 is soft per its definition: a miss
emits a warning instead of failing the suite (boundary effects of the
whole-space surrogate are documented in the criterion metadata).

Heavy runs (A6, A7, A8) take a few minutes combined at the pinned
resolutions; artifacts land in one session directory so they can be
inspected or fed to the reporting tool afterwards.
"""

import logging
import warnings

import pytest

from oldroyd_lab.acceptance import CRITERIA

logging.getLogger("oldroyd_lab.models").setLevel(logging.ERROR)


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def _report(verdict):
    print(f"{verdict.criterion}: {verdict.status()}  "
          f"measured={verdict.measured}  expected={verdict.expected}")


@pytest.mark.parametrize("cid", [c for c in CRITERIA if c != "A8"])
def test_criterion(cid, artifact_dir):
    verdict = CRITERIA[cid](artifact_dir, quiet=True)
    _report(verdict)
    assert verdict.passed is True, (
        f"{cid} failed: measured {verdict.measured}, expected {verdict.expected}"
    )


def test_criterion_a8_soft(artifact_dir):
    verdict = CRITERIA["A8"](artifact_dir, quiet=True)
    _report(verdict)
    assert verdict.passed is not None, "A8 did not evaluate"
    if not verdict.passed:
        warnings.warn(
            f"A8 (soft) outside tolerance: measured {verdict.measured}, "
            f"expected {verdict.expected}; see metadata {verdict.metadata}"
        )
