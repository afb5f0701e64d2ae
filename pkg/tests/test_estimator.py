import numpy as np
import pytest
from sklearn.base import clone

from compop.estimator import CompactnessClassifier, EssNormTransformer


def test_transformer_features():
    t = EssNormTransformer(kmax=6)
    X = t.fit_transform(["monomial(2)", "const(0.3)"])
    assert X.shape == (2, 3)
    assert X[0, 0] == pytest.approx(1, abs=1e-8)
    assert list(t.get_feature_names_out()) == ["essnorm_sq", "beta_proxy", "gap"]


def test_classifier():
    X = ["monomial(2)", "scale(0.5, identity)"]
    y = ["NonCompactConsistent", "CompactConsistent"]
    clf = CompactnessClassifier(kmax=8).fit(X, y)
    assert list(clf.predict(X)) == y
    assert clf.score(X, y) == 1.0
    assert clone(clf).get_params()["kmax"] == 8


def test_bad_input():
    with pytest.raises(ValueError):
        EssNormTransformer().fit(["bogus"])
