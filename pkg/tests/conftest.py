import pytest

from polytopes import families


@pytest.fixture
def square():
    return families.hypercube(2)


@pytest.fixture
def cube():
    return families.hypercube(3)


@pytest.fixture
def triangle():
    return families.standard_simplex(2)


@pytest.fixture
def transportation_122():
    spec = families.build_spec(families.TransportationSpec, supplies=[1, 2, 2], demands=[1, 2, 2])
    return spec, families.transportation(spec)


@pytest.fixture
def matroid_u34():
    return families.matroid_polytope(families.uniform_matroid(4, 3))
