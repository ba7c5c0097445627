"""Exact disc-potential series for toric CY3 orbifolds and their crepant resolutions.

The sklearn-style estimators live in :mod:`qmckay.estimator` (imported lazily
so the core does not pull in scikit-learn).
"""

from .exactnum import Cyclotomic, FramedRational, gamma_float, gamma_ratio, root_of_unity
from .lattice import (
    ChangeOfVariables,
    ChargeVectorSystem,
    FramingRelation,
    TransitionMatrix,
    change_of_variables,
    determine_s1,
    secondary_fan_rays,
    solve_transition,
    validate_system,
)
from .potential import (
    GeometryBundle,
    SuperpotentialSpec,
    VerificationReport,
    admissible_indices,
    build,
    index_correspondence,
    load_bundle,
    parse_bundle,
    parse_spec,
    term,
    verify_correspondence,
)
from .series import DiffReport, Monomial, PuiseuxSeries, compare, scale, substitute

__version__ = "0.1.0"


def __getattr__(name):
    if name in ("McKayCorrespondence", "SuperpotentialSeries"):
        from . import estimator

        return getattr(estimator, name)
    raise AttributeError(name)
