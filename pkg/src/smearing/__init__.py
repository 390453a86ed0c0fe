"""Smearing of finite-dimensional quantum observables by Markov kernels.

Observables are finite-outcome POV measures on C^d.  The library smears
them by (weak) Markov kernels and decides, with checkable certificates,
when a sharp observable is a smearing, a function, or a range-subset of
another observable.
"""

from .errors import SmearingError
from .kernels import (
    MarkovKernel,
    WeakMarkovKernel,
    compose,
    indicator_kernel,
    is_zero_one,
    regularize,
    smear,
    validate_kernel,
    validate_weak_kernel,
)
from .observables import (
    Observable,
    SharpObservable,
    State,
    is_commutative_range,
    is_sharp,
    maximally_mixed,
    probability_distribution,
    range_effect,
    validate,
    zero_set,
)
from .operators import Tolerance

__version__ = "0.1.0"
