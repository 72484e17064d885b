import math

import numpy as np
import pytest

from flattorus.lattice import SingularBasis, lattice_from_basis

SQRT3 = math.sqrt(3)

_ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


def record(criterion: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
        parts = _ACCEPTANCE[name]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


def random_lattice(rng, lo=-10.0, hi=10.0, max_cond=1e4):
    while True:
        B = rng.uniform(lo, hi, (2, 2))
        if np.linalg.cond(B) > max_cond:
            continue
        try:
            return lattice_from_basis(B)
        except SingularBasis:
            continue


@pytest.fixture
def Z2():
    return lattice_from_basis([[1, 0], [0, 1]])


@pytest.fixture
def A2():
    return lattice_from_basis([[1, 0], [-0.5, SQRT3 / 2]])


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
