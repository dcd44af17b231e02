import pytest

from sbmlab import mixture_spec, stable_spec


@pytest.fixture(scope="session")
def stable04():
    return stable_spec(0.4)


@pytest.fixture(scope="session")
def stable075():
    return stable_spec(0.75)


@pytest.fixture(scope="session")
def mixture():
    return mixture_spec([(0.5, 0.3), (0.5, 0.7)], a1=0.5, a2=1.0,
                        delta1=0.3, delta2=0.7)
