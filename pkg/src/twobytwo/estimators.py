"""scikit-learn compatible wrappers.

``AssociationMeasures`` maps rows of 2x2 tables to a feature matrix of
association measures; ``GammaPoissonShrinker`` fits the MGPS mixture prior
on ``(n, e)`` rows and predicts shrunk log ratios.  Both follow the usual
``fit`` / ``transform`` / ``predict`` / ``get_params`` conventions so they
drop into pipelines and grid searches.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import mgps
from .bayes import continuity_correct
from .exceptions import TableError
from .measures import NA, full_report, log_base_value
from .tables import CountTable2x2, make_prob_table
from .validation import check_pairs, check_tables

REPORT_FEATURES = (
    "odds_ratio",
    "coefficient_d",
    "yule_y",
    "yule_q",
    "lewontin_d_prime",
    "binary_r",
    "pmi",
    "npmi",
    "mi",
    "nmi",
    "signed_nmi",
    "uncertainty_x",
    "uncertainty_y",
    "rrr",
    "prr",
)


class AssociationMeasures(TransformerMixin, BaseEstimator):
    """Compute association measures for each row of an ``(m, 4)`` table array.

    Parameters
    ----------
    log_base : {2, 'e', 10}, default=2
        Base for PMI and MI.
    counts : bool, default=True
        Rows hold raw counts (converted by MLE) rather than probabilities.
    continuity : float or None, default=None
        Pseudo-count added to every cell before normalizing.
    features : sequence of str or None
        Subset of measures to output; all by default.

    Degenerate measures are returned as ``nan``.
    """

    def __init__(self, log_base=2, counts=True, continuity=None, features=None):
        self.log_base = log_base
        self.counts = counts
        self.continuity = continuity
        self.features = features

    def fit(self, X, y=None):
        check_tables(X, counts=self.counts)
        log_base_value(self.log_base)
        names = tuple(self.features) if self.features is not None else REPORT_FEATURES
        unknown = set(names) - set(REPORT_FEATURES)
        if unknown:
            raise ValueError(f"unknown features {sorted(unknown)}")
        self.features_ = names
        self.n_features_in_ = 4
        return self

    def _row_table(self, row):
        if self.counts and self.continuity is not None:
            row = continuity_correct(CountTable2x2(*(int(v) for v in row)), self.continuity)
        return make_prob_table(*row)

    def transform(self, X):
        check_is_fitted(self, "features_")
        X = check_tables(X, counts=self.counts)
        out = np.full((X.shape[0], len(self.features_)), np.nan)
        for i, row in enumerate(X):
            try:
                report = full_report(self._row_table(row), self.log_base).as_dict()
            except TableError:
                continue
            for j, name in enumerate(self.features_):
                value = report[name]
                if not isinstance(value, NA):
                    out[i, j] = value
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "features_")
        return np.asarray(self.features_, dtype=object)


class GammaPoissonShrinker(BaseEstimator):
    """Empirical-Bayes shrinkage of observed/expected count ratios.

    Input rows are ``(n, e)``: the observed joint count and its expected
    value under independence (see :func:`twobytwo.validation.pairs_from_tables`).

    Parameters
    ----------
    alpha1, beta1, alpha2, beta2, w : float
        Initial (or, with ``fit_prior=False``, fixed) mixture prior.  Shape and
        rate parameterization.
    fit_prior : bool, default=True
        Estimate the prior by maximizing the marginal likelihood.
    restarts, random_state : int
        Multi-start settings for the fit.
    pin_null : bool, default=False
        Constrain component 2 to have mean 1.
    log_base : {2, 'e', 10}, default=2

    Attributes
    ----------
    prior_ : GammaMixturePrior
    diagnostics_ : FitDiagnostics or None
    """

    def __init__(
        self,
        alpha1=0.2,
        beta1=0.1,
        alpha2=2.0,
        beta2=4.0,
        w=1.0 / 3.0,
        fit_prior=True,
        restarts=5,
        random_state=0,
        pin_null=False,
        log_base=2,
    ):
        self.alpha1 = alpha1
        self.beta1 = beta1
        self.alpha2 = alpha2
        self.beta2 = beta2
        self.w = w
        self.fit_prior = fit_prior
        self.restarts = restarts
        self.random_state = random_state
        self.pin_null = pin_null
        self.log_base = log_base

    def fit(self, X, y=None):
        X = check_pairs(X)
        init = mgps.GammaMixturePrior(self.alpha1, self.beta1, self.alpha2, self.beta2, self.w)
        if self.fit_prior:
            self.prior_, self.diagnostics_ = mgps.fit_hyperparameters(
                X, init=init, restarts=self.restarts, seed=self.random_state, pin_null=self.pin_null
            )
        else:
            self.prior_, self.diagnostics_ = init, None
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        """Posterior mean of ``log rho`` for each row."""
        check_is_fitted(self, "prior_")
        X = check_pairs(X)
        eb, _ = mgps.posterior_scores(X[:, 0], X[:, 1], self.prior_, self.log_base)
        return eb

    def transform(self, X):
        """Columns ``(eb_log, posterior_w1)``."""
        check_is_fitted(self, "prior_")
        X = check_pairs(X)
        eb, w1 = mgps.posterior_scores(X[:, 0], X[:, 1], self.prior_, self.log_base)
        return np.column_stack([eb, w1])

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)

    def score(self, X, y=None):
        """Mean log marginal likelihood per row."""
        check_is_fitted(self, "prior_")
        X = check_pairs(X)
        return float(np.mean(mgps.log_marginal_likelihood(X[:, 0], X[:, 1], self.prior_)))

    def raw_log(self, X):
        X = check_pairs(X)
        with np.errstate(divide="ignore"):
            return np.log(X[:, 0] / X[:, 1]) / math.log(log_base_value(self.log_base))
