import pytest
from hypothesis import HealthCheck, settings

from msing.coeff import Kind, Profile

settings.register_profile("msing", deadline=None, max_examples=40, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("msing")

TRIVIAL2 = Profile(2)
TRIVIAL3 = Profile(3)
COMPLEX = Profile(2, Kind.COMPLEX)
REAL = Profile(2, Kind.REAL)
ALL_PROFILES = [TRIVIAL2, TRIVIAL3, COMPLEX, REAL]


@pytest.fixture(params=ALL_PROFILES, ids=str)
def profile(request):
    return request.param
