import numpy as np
import pytest

from dtnlab import (assemble_system, build_boundary_space, exact_disk_dtn,
                    make_domain, schur_dtn, triangulate)

# one line per acceptance criterion, echoed after the run so the
# verdicts survive pytest's output capture
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def criterion_log():
    def record(number, title, verdict, detail=""):
        line = f"criterion {number:02d} [{title}]: {verdict}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def disk_b128():
    return build_boundary_space(make_domain("unit-disk"), 128)


@pytest.fixture(scope="session")
def disk_op0(disk_b128):
    """Exact flux-map operator on the unit circle, no potential."""
    return exact_disk_dtn(disk_b128)


@pytest.fixture(scope="session")
def disk_op1(disk_b128):
    """Exact operator with constant potential 1."""
    return exact_disk_dtn(disk_b128, 1.0)


@pytest.fixture(scope="session")
def fem_disk_bundle():
    """(boundary, mesh, system, operator) for the meshed disk, V = 0."""
    b = build_boundary_space(make_domain("unit-disk"), 128)
    mesh = triangulate(b.domain, b)
    system = assemble_system(mesh, b)
    return b, mesh, system, schur_dtn(system)


@pytest.fixture(scope="session")
def annulus_b():
    return build_boundary_space(make_domain(("annulus", 0.5, 1.0)), 192)
