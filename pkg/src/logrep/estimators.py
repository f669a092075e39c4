"""scikit-learn style wrapper: operators in, shifted logarithms out.

``fit`` chooses one shift ``kappa`` for a whole stack of operators, the way
a single shift serves a whole evolution family; ``transform`` maps each
operator ``U`` to ``Log(U + kappa I)`` and ``inverse_transform`` maps it
back through the exponential series.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_operator_stack
from .contour import (DEFAULT_NODES, DEFAULT_POLICY, MIN_POLICY, KappaChoice,
                      build_contour, dunford_log)
from .evolution import exp_series
from .linalg import opnorm


class OperatorLogTransformer(TransformerMixin, BaseEstimator):
    """Shifted principal logarithm of a stack of square complex matrices.

    Parameters
    ----------
    kappa_policy : float, default=2.0
        Shift multiplier; ``kappa = kappa_policy * max(1, max ||U||)``.
    nodes : int, default=256
        Trapezoidal nodes on each contour.
    kappa : float or None
        Fixed shift, bypassing the policy.  ``0`` takes unshifted logarithms.

    Attributes
    ----------
    kappa_ : float
    growth_bound_ : float
    n_features_in_ : int
        Matrix dimension.
    """

    def __init__(self, kappa_policy=DEFAULT_POLICY, nodes=DEFAULT_NODES, kappa=None):
        self.kappa_policy = kappa_policy
        self.nodes = nodes
        self.kappa = kappa

    def fit(self, X, y=None):
        X = check_operator_stack(X)
        if not self.kappa_policy >= MIN_POLICY:
            raise ValueError(f"kappa_policy must be >= {MIN_POLICY}")
        if int(self.nodes) != self.nodes or self.nodes < 8:
            raise ValueError("nodes must be an integer >= 8")
        self.growth_bound_ = max(1.0, float(np.max(opnorm(X))))
        if self.kappa is None:
            self.kappa_ = self.kappa_policy * self.growth_bound_
        else:
            self.kappa_ = float(self.kappa)
            if self.kappa_ < 0:
                raise ValueError("kappa must be non-negative")
        self.n_features_in_ = X.shape[-1]
        return self

    def _check(self, X):
        check_is_fitted(self, "kappa_")
        X = check_operator_stack(X)
        if X.shape[-1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_}x{self.n_features_in_} "
                             f"matrices, got {X.shape[-1]}")
        return X

    def transform(self, X):
        X = self._check(X)
        choice = KappaChoice.explicit(self.kappa_, self.growth_bound_)
        out = np.empty_like(X)
        for i, u in enumerate(X):
            if self.kappa_ == 0:
                out[i] = dunford_log(u, choice, nodes=self.nodes).a
            else:
                out[i] = dunford_log(u, choice, build_contour(u, choice, self.nodes)).a
        return out

    def inverse_transform(self, A):
        A = self._check(A)
        eye = np.eye(A.shape[-1])
        return np.stack([exp_series(a)[0] - self.kappa_ * eye for a in A])
