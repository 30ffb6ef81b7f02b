import math

import pytest
from hypothesis import HealthCheck, settings

from arveson_kit.core import AnalysisConfig, CuboidWindow
from arveson_kit.models import build_lattice_model, build_matrix_model

settings.register_profile("kit", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("kit")


def ladder(lengths, step):
    return AnalysisConfig(tuple(CuboidWindow.cube(L, step) for L in lengths))


@pytest.fixture(scope="session")
def m3():
    """H = diag(0, 1, 3) on M_3 with the first vector state."""
    return build_matrix_model([0.0, 1.0, 3.0], "pure:1")


@pytest.fixture(scope="session")
def m3_config():
    return ladder((32, 64, 128), 1 / 8)


@pytest.fixture(scope="session")
def chain():
    return build_lattice_model(1.0, 256)


@pytest.fixture(scope="session")
def space_config():
    return ladder((32, 64, 128), 1.0)


@pytest.fixture(scope="session")
def time_config():
    return ladder((50, 100, 200), 0.5)


HALF_PI = math.pi / 2


@pytest.fixture(scope="session")
def lattice_ex():
    """The bundled lattice experiment (model, space action, vacuum, generators, functionals)."""
    from arveson_kit.cli import Experiment, bundled_config, load_config
    return Experiment(load_config(bundled_config("lattice_m1.json")), 11, None)


@pytest.fixture(scope="session")
def matrix_ex():
    from arveson_kit.cli import Experiment, bundled_config, load_config
    return Experiment(load_config(bundled_config("matrix_m3.json")), 3, None)
