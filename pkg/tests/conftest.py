import numpy as np
import pytest

from blockplan.scene import Block, Scene, ScatterTemplate, TrialSpec


def cube(i, x=0.0, y=0.0, z=0.5, color="natural"):
    return Block(f"b{i}", (1.0, 1.0, 1.0), (x, y, z), 0.0, color)


def tower(n, x=0.0, y=0.0):
    return Scene(tuple(cube(i, x, y, 0.5 + i) for i in range(n)))


def line(n, y=0.0, gap=0.0):
    return Scene(tuple(cube(i, i * (1.0 + gap), y) for i in range(n)))


def lone_cube():
    return Scene((cube(0),))


def scatter_trial(tid, target: Scene):
    template = ScatterTemplate(len(target), tuple(b.color for b in target.blocks), (10.0, 12.0),
                               (-13.0, -6.0))
    return TrialSpec(tid, template, target)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
