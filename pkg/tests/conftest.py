import numpy as np
import pytest

from pseudoconformal.conformal import AmbientModel


@pytest.fixture(scope="session")
def model3():
    return AmbientModel.standard(3)


@pytest.fixture(scope="session")
def model4():
    return AmbientModel.standard(4)


@pytest.fixture(scope="session")
def model5():
    return AmbientModel.standard(5)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
