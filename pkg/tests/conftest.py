import pytest
from hypothesis import settings

from pvicurves.catalog import load_catalog

settings.register_profile("pvicurves", max_examples=120, deadline=None)
settings.load_profile("pvicurves")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def quartic_report(catalog):
    from pvicurves.curves.models import quartic_symmetry_check
    return quartic_symmetry_check(catalog["sol-51"])
