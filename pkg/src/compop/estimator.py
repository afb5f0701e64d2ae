"""scikit-learn style wrappers: one row per map spec, no learned state."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .essnorm import COMPACT, INCONCLUSIVE, NONCOMPACT, default_schedule, essential_norm_report
from .mapspec import SelfMap, as_selfmap
from .nevanlinna import AngleBudget
from .quad import QuadConfig

FEATURES = ("essnorm_sq", "beta_proxy", "gap")


def check_map(spec) -> SelfMap:
    """Parse and validate one map; errors from the parser propagate."""
    return as_selfmap(spec)


def _check_specs(X):
    if isinstance(X, str):
        raise TypeError("X must be a sequence of map specs, not a single string")
    X = list(np.asarray(X, dtype=object).ravel())
    if not X:
        raise ValueError("X is empty")
    return [check_map(x) for x in X]


class EssNormTransformer(TransformerMixin, BaseEstimator):
    """Maps each spec to [essnorm_sq estimate, beta proxy, gap at the last radius].

    Fitting only validates the specs; ``reports_`` keeps the last
    transform's full reports.
    """

    def __init__(self, kmax=10, min_angles=256, abs_tol=1e-9, rel_tol=1e-8):
        self.kmax = kmax
        self.min_angles = min_angles
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol

    def fit(self, X, y=None):
        _check_specs(X)
        self.schedule_ = default_schedule(self.kmax)
        self.config_ = QuadConfig(abs_tol=self.abs_tol, rel_tol=self.rel_tol)
        self.budget_ = AngleBudget(min_angles=self.min_angles)
        self.n_features_in_ = 1
        return self

    def _reports(self, X):
        check_is_fitted(self, "schedule_")
        maps = _check_specs(X)
        self.reports_ = [essential_norm_report(m, self.schedule_, self.config_, self.budget_) for m in maps]
        return self.reports_

    def transform(self, X):
        reps = self._reports(X)
        return np.array([[r.essnorm_sq_estimate, r.beta_proxy, r.discrepancy] for r in reps])

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURES, dtype=object)


class CompactnessClassifier(ClassifierMixin, EssNormTransformer):
    """Predicts the compactness verdict for each spec."""

    def fit(self, X, y=None):
        super().fit(X, y)
        self.classes_ = np.array([COMPACT, INCONCLUSIVE, NONCOMPACT], dtype=object)
        return self

    def predict(self, X):
        return np.array([r.verdict for r in self._reports(X)], dtype=object)
