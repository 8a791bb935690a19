import numpy as np
import pytest

from effortbench.ingest import Dataset, FeatureColumn
from effortbench.numerics import RngStream


def make_dataset(X, y, ds_id="toy", names=None):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    names = names or [f"x{j}" for j in range(X.shape[1])]
    return Dataset(
        id=ds_id,
        features=tuple(FeatureColumn(n, X[:, j]) for j, n in enumerate(names)),
        target=FeatureColumn("Effort", y),
        source_checksum="test",
    )


@pytest.fixture
def rng():
    return RngStream(20190101)


@pytest.fixture
def small_regression():
    """12 rows, 3 features, y linear in x0 plus mild noise."""
    g = np.random.default_rng(99)
    X = g.normal(size=(12, 3))
    y = 2.0 * X[:, 0] + 0.05 * g.normal(size=12)
    return X, y
