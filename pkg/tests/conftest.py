import pytest

from vehstring import RoadParams


@pytest.fixture(scope="session")
def road() -> RoadParams:
    """Default arterial-road parameter set used throughout the suite."""
    return RoadParams()
