"""scikit-learn style wrappers around the correspondence pipeline.

``McKayCorrespondence().fit(orbifold, resolution)`` derives the framing
relation, change of variables and s1 from the two bundles and verifies the
identity up to ``m0_max``; afterwards ``transform`` carries any orbifold-side
series over to the resolution variables.
"""

from __future__ import annotations

from fractions import Fraction

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exactnum import as_rational
from .potential import GeometryBundle, build, load_bundle, parse_bundle, verify_correspondence
from .series import PuiseuxSeries, compare, scale, substitute


def check_bundle(obj) -> GeometryBundle:
    """Accept a GeometryBundle, a parsed JSON document, a path or a bundled name."""
    if isinstance(obj, GeometryBundle):
        return obj
    if isinstance(obj, dict):
        return parse_bundle(obj)
    if isinstance(obj, (str, bytes)) or hasattr(obj, "__fspath__"):
        return load_bundle(obj)
    raise TypeError(f"expected a geometry bundle, got {type(obj).__name__}")


def check_framing(value) -> Fraction:
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"framing must be exact; got float {value!r}")
        value = int(value)
    return as_rational(value)


def check_m0_max(value) -> int:
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise ValueError(f"m0_max must be a nonnegative integer, got {value!r}")
    return int(value)


def _as_series_list(X):
    if isinstance(X, PuiseuxSeries):
        return [X], True
    return list(X), False


class McKayCorrespondence(TransformerMixin, BaseEstimator):
    """Fit the orbifold-to-resolution correspondence from two geometry bundles.

    Parameters
    ----------
    framing_hat : rational, default 0
        Framing on the resolution side; the orbifold framing is derived.
    m0_max : int, default 15
        Brane-index truncation for the verification run in ``fit``.
    n_jobs : int, default 1
        Worker processes for term evaluation.
    strict : bool, default True
        Raise if the identity fails during ``fit`` instead of only recording it.

    Attributes
    ----------
    report_, transition_, framing_relation_, framing_, change_of_variables_, s1_
    """

    def __init__(self, framing_hat=0, m0_max=15, n_jobs=1, strict=True):
        self.framing_hat = framing_hat
        self.m0_max = m0_max
        self.n_jobs = n_jobs
        self.strict = strict

    def fit(self, X, y):
        orbifold, resolution = check_bundle(X), check_bundle(y)
        fh = check_framing(self.framing_hat)
        rep = verify_correspondence(
            orbifold, resolution, fh, check_m0_max(self.m0_max), self.n_jobs or 1
        )
        if self.strict and not rep.passed:
            raise ValueError(f"correspondence does not hold: {rep.diff.total} differing terms")
        self.orbifold_ = orbifold
        self.resolution_ = resolution
        self.report_ = rep
        self.transition_ = rep.transition
        self.framing_relation_ = rep.relation
        self.framing_ = rep.framing
        self.change_of_variables_ = rep.cov
        self.s1_ = rep.s1
        return self

    def transform(self, X):
        """Substitute orbifold-side series into the resolution variables."""
        check_is_fitted(self, "change_of_variables_")
        items, single = _as_series_list(X)
        out = [substitute(s, self.change_of_variables_) for s in items]
        return out[0] if single else out

    def predict(self, X):
        """Resolution-side series predicted from orbifold-side ones (divided by s1)."""
        check_is_fitted(self, "s1_")
        items, single = _as_series_list(self.transform(X))
        out = [scale(s, Fraction(1, self.s1_)) for s in items]
        return out[0] if single else out

    def score(self, X=None, y=None):
        """Fraction of exactly matching terms between predicted and built resolution series.

        Without arguments both series are rebuilt from the fitted bundles.
        """
        check_is_fitted(self, "s1_")
        m0 = check_m0_max(self.m0_max)
        if X is None:
            X = build(self.orbifold_.spec, self.framing_, m0, self.n_jobs or 1)
        if y is None:
            y = build(self.resolution_.spec, check_framing(self.framing_hat), m0, self.n_jobs or 1)
        diff = compare(self.predict(X), y)
        total = diff.matched + diff.total
        return 1.0 if total == 0 else diff.matched / total


class SuperpotentialSeries(BaseEstimator):
    """Build the truncated superpotential of one bundle; ``series_`` after ``fit``."""

    def __init__(self, framing=0, m0_max=15, n_jobs=1):
        self.framing = framing
        self.m0_max = m0_max
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        self.bundle_ = check_bundle(X)
        self.series_ = build(
            self.bundle_.spec, check_framing(self.framing), check_m0_max(self.m0_max), self.n_jobs or 1
        )
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).series_
