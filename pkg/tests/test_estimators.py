import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from twobytwo.estimators import REPORT_FEATURES, AssociationMeasures, GammaPoissonShrinker
from twobytwo.exceptions import NegativeEntry, NonPositiveExpected, TooFewPairs
from twobytwo.measures import full_report
from twobytwo.mgps import DEFAULT_PRIOR, fit_hyperparameters, posterior_scores
from twobytwo.tables import make_prob_table
from twobytwo.validation import pairs_from_tables

COUNTS = np.array([[840, 43, 59, 58], [25, 25, 25, 25], [0, 5, 5, 0], [5, 5, 0, 0]])


class TestAssociationMeasures:
    def test_matches_full_report(self):
        out = AssociationMeasures().fit_transform(COUNTS)
        assert out.shape == (4, len(REPORT_FEATURES))
        report = full_report(make_prob_table(840, 43, 59, 58)).as_dict()
        np.testing.assert_allclose(out[0], [report[k] for k in REPORT_FEATURES], rtol=1e-12)

    def test_degenerate_is_nan(self):
        out = AssociationMeasures(features=["odds_ratio", "yule_y", "binary_r"]).fit_transform(COUNTS)
        assert out[2, 0] == 0 and out[2, 1] == -1
        assert np.isnan(out[3, 0]) and np.isnan(out[3, 2])

    def test_continuity(self):
        out = AssociationMeasures(continuity=0.5, features=["odds_ratio"]).fit_transform(COUNTS[2:3])
        assert out[0, 0] == pytest.approx(0.5**2 / 5.5**2)

    def test_probabilities(self):
        est = AssociationMeasures(counts=False, features=["mi"], log_base="e")
        out = est.fit_transform([[0.4, 0.1, 0.1, 0.4]])
        assert out[0, 0] == pytest.approx(full_report(make_prob_table(4, 1, 1, 4), "e").mi)

    def test_feature_names(self):
        est = AssociationMeasures(features=["pmi", "mi"]).fit(COUNTS)
        assert list(est.get_feature_names_out()) == ["pmi", "mi"]

    def test_params_and_clone(self):
        est = AssociationMeasures(log_base=10, continuity=0.5)
        assert est.get_params() == {"log_base": 10, "counts": True, "continuity": 0.5, "features": None}
        twin = clone(est)
        assert twin.get_params() == est.get_params() and twin is not est

    def test_validation(self):
        with pytest.raises(ValueError):
            AssociationMeasures().fit(np.ones((2, 3)))
        with pytest.raises(NegativeEntry):
            AssociationMeasures().fit([[1, -1, 1, 1]])
        with pytest.raises(ValueError):
            AssociationMeasures().fit([[1.5, 1, 1, 1]])
        with pytest.raises(ValueError):
            AssociationMeasures(features=["chi2"]).fit(COUNTS)
        with pytest.raises(NotFittedError):
            AssociationMeasures().transform(COUNTS)


def _pairs(m=400, seed=0):
    rng = np.random.default_rng(seed)
    e = rng.uniform(0.5, 30, m)
    rho = np.where(rng.uniform(size=m) < 0.3, rng.gamma(0.2, 10, m), rng.gamma(2, 0.25, m))
    return np.column_stack([rng.poisson(rho * e), e])


class TestGammaPoissonShrinker:
    def test_matches_functional_fit(self):
        X = _pairs()
        est = GammaPoissonShrinker(restarts=2, random_state=4).fit(X)
        prior, _ = fit_hyperparameters(X, restarts=2, seed=4)
        assert est.prior_ == prior
        np.testing.assert_array_equal(est.predict(X), posterior_scores(X[:, 0], X[:, 1], prior)[0])

    def test_fixed_prior(self):
        X = _pairs(50)
        est = GammaPoissonShrinker(fit_prior=False).fit(X)
        assert est.prior_ == DEFAULT_PRIOR and est.diagnostics_ is None
        eb, w1 = posterior_scores(X[:, 0], X[:, 1], DEFAULT_PRIOR)
        np.testing.assert_array_equal(est.transform(X), np.column_stack([eb, w1]))

    def test_score_improves_with_fit(self):
        X = _pairs()
        fixed = GammaPoissonShrinker(alpha1=1, beta1=1, alpha2=1, beta2=1, w=0.5, fit_prior=False).fit(X)
        fitted = GammaPoissonShrinker(restarts=2).fit(X)
        assert fitted.score(X) > fixed.score(X)

    def test_raw_log(self):
        est = GammaPoissonShrinker(fit_prior=False)
        raw = est.raw_log([[8, 2], [0, 1]])
        assert raw[0] == pytest.approx(2.0) and raw[1] == -math.inf

    def test_pipeline_from_tables(self):
        tables = np.array([[1000 - 3 * k, k, k, k] for k in range(1, 30)])
        pipe = make_pipeline(
            FunctionTransformer(pairs_from_tables), GammaPoissonShrinker(fit_prior=False)
        )
        eb = pipe.fit(tables).predict(tables)
        expected = posterior_scores(tables[:, 3], (2 * tables[:, 3]) ** 2 / 1000, DEFAULT_PRIOR)[0]
        np.testing.assert_allclose(eb, expected, rtol=1e-12)

    def test_clone_and_set_params(self):
        est = GammaPoissonShrinker(restarts=3).set_params(pin_null=True, log_base="e")
        twin = clone(est)
        assert twin.get_params()["restarts"] == 3
        assert twin.get_params()["pin_null"] is True
        assert not hasattr(twin, "prior_")

    def test_errors(self):
        with pytest.raises(TooFewPairs):
            GammaPoissonShrinker().fit(_pairs(5))
        with pytest.raises(NonPositiveExpected):
            GammaPoissonShrinker(fit_prior=False).fit([[1, 0.0]])
        with pytest.raises(NotFittedError):
            GammaPoissonShrinker().predict([[1, 1.0]])


def test_pairs_from_tables():
    out = pairs_from_tables([[60, 20, 10, 10], [5, 5, 0, 0]])
    assert out[0].tolist() == [10, 6]
    assert out[1, 0] == 0 and np.isnan(out[1, 1])
