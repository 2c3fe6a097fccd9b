"""Lipschitz spaces and Arens-Eells norms over finite pointed metric spaces."""

from .config import Config, TolerancePolicy
from .kernels import BACKEND
from .metric_core import (
    MetricError,
    MetricSpace,
    augment_base,
    closed_ball,
    convexity_defect,
    interval_grid,
    rescale,
    truncate,
    validate,
)
from .lip_functions import (
    LipFunction,
    extend_by_zero,
    h_function,
    ideal_membership,
    join,
    lip_norm,
    lipschitz_number,
    meet,
    rebase,
    sup_norm,
)
from .free_space import (
    Molecule,
    ae_norm,
    ae_norm_dual,
    ae_norm_primal,
    canonicalize,
    certify,
    check_certificates,
    example_molecule,
    minimal_positive_decomposition,
    pairing,
)

__version__ = "0.1.0"
