import numpy as np
import pytest

from vnalg import FdAlgebra


@pytest.fixture
def m2():
    return FdAlgebra([2], "M2")


@pytest.fixture
def m3():
    return FdAlgebra([3], "M3")


@pytest.fixture
def m23():
    return FdAlgebra([2, 3], "M2+M3")


@pytest.fixture
def paulis(m2):
    sx = m2.element([[[0, 1], [1, 0]]])
    sy = m2.element([np.array([[0, -1j], [1j, 0]])])
    sz = m2.element([[[1, 0], [0, -1]]])
    return sx, sy, sz


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
