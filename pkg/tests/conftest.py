import numpy as np
import pytest

from adavr import FiniteSumObjective, LOGISTIC, SQUARED, LabeledDataset, synth_classification


@pytest.fixture(scope="session")
def ds20x5():
    return synth_classification(20, 5, seed=101)


@pytest.fixture(scope="session")
def logistic20x5(ds20x5):
    return FiniteSumObjective(ds20x5, LOGISTIC, 0.05)


@pytest.fixture(scope="session")
def quad1d():
    """f(x) = 0.5 x^2 + 0.5 from the symmetric pair 0.5(x-1)^2, 0.5(x+1)^2."""
    ds = LabeledDataset.from_dense(np.array([[1.0], [1.0]]), np.array([1.0, -1.0]))
    return FiniteSumObjective(ds, SQUARED, 0.0)
