from fractions import Fraction as F

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qmckay import McKayCorrespondence, SuperpotentialSeries
from qmckay.estimator import check_bundle, check_framing, check_m0_max
from qmckay.errors import PipelineError
from qmckay.potential import build
from qmckay.series import scale


def test_params_and_clone():
    est = McKayCorrespondence(framing_hat=2, m0_max=8)
    assert est.get_params() == {"framing_hat": 2, "m0_max": 8, "n_jobs": 1, "strict": True}
    c = clone(est)
    assert c.get_params() == est.get_params() and c is not est
    est.set_params(m0_max=3)
    assert est.m0_max == 3


def test_fit_attributes(orbifold, resolution):
    est = McKayCorrespondence(m0_max=15).fit(orbifold, resolution)
    assert est.s1_ == 5
    assert est.framing_ == 2
    assert (est.framing_relation_.alpha, est.framing_relation_.beta) == (5, 2)
    assert est.change_of_variables_.rules()[0] == "q4 = qh1^(-1/5)"
    assert est.report_.passed


def test_fit_accepts_names_and_documents(orbifold_doc):
    est = McKayCorrespondence(framing_hat=1, m0_max=6).fit(orbifold_doc, "z5-resolution")
    assert est.framing_ == 7


def test_predict_reproduces_resolution_series(orbifold, resolution):
    est = McKayCorrespondence(framing_hat=3, m0_max=10).fit(orbifold, resolution)
    w = build(orbifold.spec, est.framing_, 10)
    assert est.predict(w) == build(resolution.spec, 3, 10)
    assert est.transform([w])[0] == scale(est.predict(w), 5)
    assert est.score() == 1.0


def test_score_with_wrong_target(orbifold, resolution):
    est = McKayCorrespondence(m0_max=6).fit(orbifold, resolution)
    other = build(resolution.spec, 1, 6)
    assert est.score(y=other) < 1.0


def test_not_fitted():
    with pytest.raises(NotFittedError):
        McKayCorrespondence().transform([])


def test_structural_failure_propagates(orbifold, perturbed_doc):
    with pytest.raises(PipelineError):
        McKayCorrespondence(m0_max=4).fit(orbifold, perturbed_doc)


def test_superpotential_series(resolution):
    s = SuperpotentialSeries(framing=0, m0_max=15).fit_transform(resolution)
    assert len(s) == 86


@pytest.mark.parametrize("bad", [0.5, F(1, 2) + 0.0])
def test_check_framing_rejects_inexact(bad):
    with pytest.raises(ValueError):
        check_framing(bad)


def test_check_helpers():
    assert check_framing(3.0) == 3 and check_framing("2/5") == F(2, 5)
    for bad in (-1, 2.5, True):
        with pytest.raises(ValueError):
            check_m0_max(bad)
    with pytest.raises(TypeError):
        check_bundle(42)
