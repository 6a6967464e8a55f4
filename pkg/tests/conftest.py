"""Shared fixtures and the acceptance-summary reporter."""

from __future__ import annotations

import numpy as np
import pytest

from wsntopo.geometry import Deployment, DeploymentConfig

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"ACCEPTANCE {number} {name}: {status}"
    if detail:
        line += f"  [{detail}]"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_deployment(positions, side, r, energies=None, sink_position=None):
    """Deployment with hand-placed nodes; node 0 is the sink."""
    positions = np.asarray(positions, dtype=np.float64)
    n = len(positions)
    if sink_position is None:
        sink_position = tuple(positions[0])
    cfg = DeploymentConfig(n=n, side=side, r=r, sink_position=sink_position)
    if energies is None:
        energies = np.full(n, 1.0)
    return Deployment(
        config=cfg, positions=positions, energies=np.asarray(energies, dtype=np.float64)
    )


@pytest.fixture
def line_deployment():
    """5 nodes on a line at spacing 0.6r; interior nodes see 2 neighbors."""
    r = 10.0
    xs = [(i * 0.6 * r, 0.0) for i in range(5)]
    return make_deployment(xs, side=100.0, r=r)


@pytest.fixture
def clique_deployment():
    """12 nodes packed inside one disk: every pair is in range."""
    gen = np.random.Generator(np.random.Philox(key=1234))
    pts = 5.0 + gen.random((12, 2)) * 2.0
    return make_deployment(pts, side=20.0, r=19.0)
