"""scikit-learn style wrappers.

Both estimators are fitted on the atoms (one per row, as with any sklearn
``X``) and then applied to query points, one per row.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .geometry import Dictionary
from .locality import METHODS, THRESHOLD, identify, support
from .oracle import MAX_SUBSETS, enumerate_delaunay
from .qp import solve_relaxed_R


class LocalityCoder(TransformerMixin, BaseEstimator):
    """Locality-regularized simplex coding of queries over a fixed set of atoms.

    Parameters
    ----------
    rho : float, default=1e-7
        Locality weight. Large values pick the nearest atom; small values
        reconstruct the query from the vertices of its Delaunay simplex.
    tol : float, default=1e-9
        Interior-point termination tolerance.
    max_iter : int, default=100
    threshold : float, default=1e-6
        Weights above it count as support in :meth:`support_sets`.

    Attributes
    ----------
    dictionary_ : Dictionary
    n_features_in_ : int
    """

    def __init__(self, rho=1e-7, tol=1e-9, max_iter=100, threshold=THRESHOLD):
        self.rho = rho
        self.tol = tol
        self.max_iter = max_iter
        self.threshold = threshold

    def fit(self, X, y=None):
        """Store the atoms, shape ``(n_atoms, d)``."""
        X = check_array(X, dtype=float)
        self.dictionary_ = Dictionary.from_rows(X)
        self.n_features_in_ = X.shape[1]
        return self

    def _solve(self, Y):
        check_is_fitted(self, "dictionary_")
        Y = check_array(Y, dtype=float)
        if Y.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {Y.shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_} features as input"
            )
        return [solve_relaxed_R(self.dictionary_, y, self.rho, tol=self.tol,
                                max_iter=self.max_iter) for y in Y]

    def transform(self, X):
        """Simplex weights for each query row, shape ``(n_queries, n_atoms)``."""
        return np.vstack([rep.w for rep in self._solve(X)])

    def reconstruct(self, X):
        """``W @ atoms``: the locally reconstructed queries."""
        return self.transform(X) @ self.dictionary_.rows

    def support_sets(self, X):
        return [support(w, self.threshold) for w in self.transform(X)]


class DelaunayLocator(BaseEstimator):
    """Predict the vertices of the Delaunay simplex containing each query.

    Parameters
    ----------
    method : {"relaxed", "exact", "chlp", "oracle"}, default="relaxed"
    rho : float, optional
        Locality weight for ``relaxed``; by default half the per-query
        identification bound when it is computable, else ``1e-7``.
    threshold : float, default=1e-6
    max_subsets : int, default=1_000_000
        Enumeration budget of the brute-force triangulation, which is built
        at fit time only for ``method="oracle"``.
    """

    def __init__(self, method="relaxed", rho=None, threshold=THRESHOLD,
                 max_subsets=MAX_SUBSETS):
        self.method = method
        self.rho = rho
        self.threshold = threshold
        self.max_subsets = max_subsets

    def fit(self, X, y=None):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        X = check_array(X, dtype=float)
        self.dictionary_ = Dictionary.from_rows(X)
        self.n_features_in_ = X.shape[1]
        self.triangulation_ = (enumerate_delaunay(self.dictionary_, self.max_subsets)
                               if self.method == "oracle" else None)
        return self

    def identify(self, X):
        """Full :class:`IdentificationResult` per query row."""
        check_is_fitted(self, "dictionary_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return [identify(self.dictionary_, y, self.method, rho=self.rho,
                         threshold=self.threshold, dt=self.triangulation_,
                         max_subsets=self.max_subsets) for y in X]

    def predict(self, X):
        """Vertex indices per query, shape ``(n_queries, d + 1)``, padded with -1.

        A row of -1 means the query was reported outside the hull.
        """
        results = self.identify(X)
        width = max([self.n_features_in_ + 1] + [len(r.support) for r in results])
        out = np.full((len(results), width), -1, dtype=int)
        for k, r in enumerate(results):
            out[k, :len(r.support)] = r.support
        return out
