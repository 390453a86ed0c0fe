"""Decision procedures with certificates for smearing relations."""

from .extremal import Perturbation, extremal_perturbation_check, is_extremal
from .order import (
    equivalent,
    find_kernel,
    finer_sharp,
    is_clean_sharp,
    kernel_lp,
    preceq,
)
from .parent import SharpParent, joint_eigenbasis, sharp_parent
from .ranges import (
    BlockPartition,
    block_partition,
    brute_force_contains_range,
    contains_range,
    find_indicator_kernel,
    function_of,
    kernel_from_map,
    projection_commutes_check,
)
from .suite import EquivalenceReport, equivalence_suite

__all__ = [
    "BlockPartition",
    "EquivalenceReport",
    "Perturbation",
    "SharpParent",
    "block_partition",
    "brute_force_contains_range",
    "contains_range",
    "equivalence_suite",
    "equivalent",
    "extremal_perturbation_check",
    "find_indicator_kernel",
    "find_kernel",
    "finer_sharp",
    "function_of",
    "is_clean_sharp",
    "is_extremal",
    "joint_eigenbasis",
    "kernel_from_map",
    "kernel_lp",
    "preceq",
    "projection_commutes_check",
    "sharp_parent",
]
