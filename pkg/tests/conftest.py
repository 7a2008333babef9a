"""Session-wide fixtures for tests that range over the default sweep."""

import pytest

from focal.search import SearchBounds, enumerate_kripke_models


@pytest.fixture(scope="session")
def default_bounds():
    return SearchBounds()


@pytest.fixture(scope="session")
def full_sweep(default_bounds):
    # one enumeration shared by every sweep-wide property in the session
    return list(enumerate_kripke_models(default_bounds))
