import numpy as np
import pytest

from lmexplorer import explorer, fixtures

ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] {name}" + (f" — {detail}" if detail else ""))
    assert passed, f"{name}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def crossing_scene_doc():
    return fixtures.scene_doc("crossing_disks")


@pytest.fixture(scope="session")
def crossing_bundle_doc():
    return fixtures.bundle_doc("crossing_disks")


@pytest.fixture(scope="session")
def crossing_session(crossing_scene_doc, crossing_bundle_doc):
    """Fully expanded crossing-disks run (seed 7, paper params, 2000/level)."""
    session = explorer.new_session(crossing_scene_doc, crossing_bundle_doc, seed=7)
    explorer.run_batch(session, "breadth_first", explorer.SampleBudget(2000), max_nodes=8)
    return session


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def empty_square_scene_doc(radius: float = 0.1) -> dict:
    """Single disk robot in an obstacle-free box whose free center region
    contains the unit square."""
    return {
        "name": "empty_square",
        "workspace": {"bounds": [-0.2, -0.2, 1.2, 1.2], "obstacles": []},
        "robots": [
            {
                "name": "bot",
                "shape": {"type": "disk", "radius": radius},
                "space": "R2",
                "start": [0.0, 0.0],
                "goal": [1.0, 1.0],
            }
        ],
    }


@pytest.fixture
def empty_square_space():
    from lmexplorer import cspace, scene

    sc = scene.load_scene(empty_square_scene_doc())
    return cspace.full_space(sc)
