import pytest
from hypothesis import HealthCheck, settings

from orrforge.search import catalog_group, catalog_names

settings.register_profile("orrforge", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("orrforge")


@pytest.fixture(scope="session")
def catalog():
    return {name: catalog_group(name) for name in catalog_names()}
