import pytest

from src.model import Grid1D, Grid2D, Parameters, SourceSpec
from src.model.sources import Interval, Patch


@pytest.fixture
def unit():
    return Parameters()


@pytest.fixture
def line():
    """h = 0.01 on the unit interval."""
    return Grid1D.from_spacing(1.0, 0.01)


@pytest.fixture
def square():
    return Grid2D.square(1.0, 17)


@pytest.fixture
def centered_patch():
    return SourceSpec(patches=(Patch(Interval(0.45, 0.55), 1.0),))


@pytest.fixture
def point_source():
    return SourceSpec.point((0.5,), 1.0)
