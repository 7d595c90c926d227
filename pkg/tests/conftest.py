import numpy as np
import pytest

from shared_dof import builtin_scenario
from shared_dof.geometry import Pose, WorkspaceLimits


@pytest.fixture(scope="session")
def canonical():
    return builtin_scenario("canonical")


@pytest.fixture(scope="session")
def deadlock():
    return builtin_scenario("deadlock")


@pytest.fixture
def wide_limits():
    """A box large enough that clamping never kicks in."""
    return WorkspaceLimits(
        np.array([-10.0, -10.0, -10.0]),
        np.array([10.0, 10.0, 10.0]),
        max_linear_speed=100.0,
        max_angular_speed=100.0,
        max_aperture_rate=100.0,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def minimal_raw_scenario(**overrides) -> dict:
    """Smallest scenario dict that passes validation; override to break."""
    raw = {
        "name": "mini",
        "tick_dt": 0.05,
        "seed": 3,
        "start_pose": {"position": [0, 0, 0.2],
                       "orientation": [1, 0, 0, 0], "aperture": 1.0},
        "limits": {"min": [-1, -1, 0], "max": [1, 1, 1],
                   "max_linear_speed": 0.5, "max_angular_speed": 2.0,
                   "max_aperture_rate": 3.0},
        "objects": [{"id": "box", "half_extents": [0.02, 0.02, 0.02],
                     "position": [0.3, 0.0, 0.05],
                     "orientation": [1, 0, 0, 0],
                     "graspable": True, "color_tag": "blue"}],
        "zones": [{"id": "pad", "center": [-0.3, 0.0, 0.0],
                   "radius": 0.1, "color_tag": "red"}],
    }
    raw.update(overrides)
    return raw


def random_unit_quat(rng) -> np.ndarray:
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def random_pose(rng, box=1.0) -> Pose:
    return Pose(
        rng.uniform(-box, box, size=3),
        random_unit_quat(rng),
        rng.uniform(0.0, 1.0),
    )
