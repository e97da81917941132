import pytest

from rudin_shapiro.core import build_rs_pair


@pytest.fixture(scope="session")
def pairs():
    cache = {}

    def get(k):
        if k not in cache:
            cache[k] = build_rs_pair(k)
        return cache[k]
    return get
