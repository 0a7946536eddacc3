import json
from pathlib import Path

import numpy as np
import pytest

from frspace.jets import jet_from_dict

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def frozen():
    """Jets, tangent vectors and reference values computed once by an
    independent 40-digit mpmath evaluation, then frozen."""
    raw = json.loads((DATA / "frozen_oracle.json").read_text())
    cases = {}
    for name, c in raw["cases"].items():
        cases[name] = dict(c, jet=jet_from_dict(c["jet"]), y=np.array(c["y"]))
    return cases


def rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


# acceptance summary ----------------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, ok: bool, title: str, detail: str = "") -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
