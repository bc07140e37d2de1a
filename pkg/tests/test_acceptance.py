"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one ``criterion N: PASS|FAIL`` line, printed in the
terminal summary and to stdout.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from vortexsym import catalog, verify
from vortexsym.reduction import STANDARD_SCHEMES, make_scheme


def _record(number: int, title: str, checks, seconds: float, budget: float | None = None):
    failed = [c for c in checks if not c.passed]
    worst = max(checks, key=lambda c: (not c.passed, c.value / c.threshold if c.threshold > 0 else c.value))
    in_time = budget is None or seconds < budget
    ok = not failed and in_time
    timing = f"{seconds:.1f} s" + (f" of {budget:.0f} s" if budget is not None else "")
    detail = f"{len(checks)} checks, {len(failed)} failed, tightest: {worst.line()}, {timing}"
    line = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'} [{detail}]"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert not failed, "\n".join(c.line() for c in failed)
    assert in_time, f"took {seconds:.1f} s, budget {budget} s"


def _timed(section: str, **kwargs):
    start = time.perf_counter()
    checks = verify.SECTIONS[section](**kwargs)
    return checks, time.perf_counter() - start


def test_criterion_01_tables():
    checks, seconds = _timed("tables", seed=0)
    roots = {(n, p): catalog.dihedral_roots(n, p) for n in (2, 3, 5) for p in (False, True)}
    # headline entries quoted in the criterion
    assert roots[2, False].lambda_anti == pytest.approx(math.sqrt(1.5), abs=1e-10)
    assert roots[2, False].z_prism == pytest.approx(1 / math.sqrt(2), abs=1e-10)
    assert roots[3, True].z_anti == pytest.approx(1 / 3, abs=1e-10)
    assert roots[5, True].lambda_anti == pytest.approx(math.sqrt(5) / 2, abs=1e-10)
    assert roots[5, False].lambda_prism == pytest.approx(1.20467, abs=5e-5)
    assert roots[5, False].z_prism == pytest.approx(0.557613, abs=5e-5)
    assert roots[5, True].lambda_prism == pytest.approx(1.12677, abs=5e-5)
    assert roots[5, True].z_prism == pytest.approx(0.460816, abs=5e-5)
    _record(1, "table reproduction", checks, seconds, budget=1.0)


def test_criterion_02_tetrahedral_roots():
    checks, seconds = _timed("tetrahedral", seed=0)
    _record(2, "tetrahedral roots", checks, seconds)


def test_criterion_03_equilibrium_residuals():
    checks, seconds = _timed("residuals", seed=0)
    names = {c.name for c in checks}
    for solid in ("tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron"):
        assert f"platonic[{solid}]" in names
    for fixed in ("none", "poles"):
        assert f"equilibria{make_scheme('Dn', 5, fixed).label}" in names
    _record(3, "equilibrium residuals", checks, seconds)


def test_criterion_04_identities():
    checks, seconds = _timed("identities", seed=0)
    assert sum(c.name.startswith("group_sum") for c in checks) == 12
    assert sum(c.name.startswith("trig_identity") for c in checks) == 9
    assert sum(c.name.startswith("pullback") for c in checks) == len(STANDARD_SCHEMES)
    _record(4, "identity suite", checks, seconds)


@pytest.mark.slow
def test_criterion_05_conjugacy():
    checks, seconds = _timed("conjugacy", seed=0)
    assert len(checks) == len(STANDARD_SCHEMES)
    _record(5, "reduction conjugacy", checks, seconds, budget=120.0)


def test_criterion_06_momentum():
    checks, seconds = _timed("momentum", seed=0)
    _record(6, "momentum vanishing", checks, seconds)


def test_criterion_07_regularization():
    checks, seconds = _timed("regularization", seed=0)
    assert all(c.threshold == 0.0 for c in checks if c.name.startswith("zero_on_fixed_set"))
    _record(7, "regularization consistency", checks, seconds)


@pytest.mark.slow
def test_criterion_08_families():
    checks, seconds = _timed("families", seed=0)
    centres = {c.name.split(" ")[0] for c in checks}
    for name in ("icosahedron", "dodecahedron", "polygon-with-poles", "anti-prism-with-poles"):
        assert any(f"[{name}@" in c for c in centres)
    _record(8, "periodic families", checks, seconds)


def test_criterion_09_completeness():
    checks, worst_seconds = [], 0.0
    for spec in STANDARD_SCHEMES:
        s = make_scheme(*spec)
        start = time.perf_counter()
        res = catalog.critical_point_search(s, (200, 200))
        seconds = time.perf_counter() - start
        worst_seconds = max(worst_seconds, seconds)
        assert seconds < 60.0, f"{s.label} took {seconds:.1f} s"
        assert len(res.critical_points) > 0
        checks.append(verify._check("completeness", f"completeness{s.label}", res.max_distance, 1e-6,
                                    "max distance to catalogue"))
    _record(9, "critical-point completeness", checks, worst_seconds, budget=60.0)


@pytest.mark.slow
def test_criterion_10_portrait_symmetry():
    checks, seconds = _timed("portrait", seed=0)
    groups_by_scheme = {c.name.split("->")[0]: c.name.split("->")[1].split(":")[0] for c in checks}
    assert groups_by_scheme == {
        "portrait_symmetry(D2,none)": "O",
        "portrait_symmetry(D3,none)": "D6",
        "portrait_symmetry(D4,none)": "D8",
        "portrait_symmetry(D2,poles)": "D4",
        "portrait_symmetry(T,none)": "O",
        "portrait_symmetry(T,cube)": "O",
    }
    _record(10, "portrait symmetry", checks, seconds)
