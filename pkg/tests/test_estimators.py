import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from delaunay_locality import DelaunayLocator, LocalityCoder

ATOMS = np.array([[0, 0], [1, 0], [0, 1], [2, 2]], dtype=float)


def test_coder_transform():
    coder = LocalityCoder(rho=0.005).fit(ATOMS)
    W = coder.transform([[0.25, 0.25], [1.0, 1.0]])
    assert W.shape == (2, 4)
    np.testing.assert_allclose(W.sum(1), 1.0, atol=1e-9)
    assert coder.support_sets([[0.25, 0.25]]) == [(0, 1, 2)]
    np.testing.assert_allclose(coder.reconstruct([[0.25, 0.25]]), [[0.2475, 0.2475]], atol=1e-8)


def test_coder_params():
    coder = LocalityCoder(rho=0.1, max_iter=50)
    assert coder.get_params()["rho"] == 0.1
    assert clone(coder).set_params(rho=0.2).rho == 0.2


def test_not_fitted():
    with pytest.raises(NotFittedError):
        LocalityCoder().transform([[0, 0]])


def test_feature_mismatch():
    coder = LocalityCoder().fit(ATOMS)
    with pytest.raises(ValueError):
        coder.transform([[0, 0, 0]])


@pytest.mark.parametrize("method", ["relaxed", "exact", "chlp", "oracle"])
def test_locator_predict(method):
    loc = DelaunayLocator(method=method).fit(ATOMS)
    pred = loc.predict([[0.25, 0.25], [1, 1], [-1, -1]])
    np.testing.assert_array_equal(pred[0], [0, 1, 2])
    np.testing.assert_array_equal(pred[1], [1, 2, 3])
    if method in ("exact", "chlp", "oracle"):
        np.testing.assert_array_equal(pred[2], [-1, -1, -1])


def test_locator_bad_method():
    with pytest.raises(ValueError):
        DelaunayLocator(method="nope").fit(ATOMS)
