"""Saturated fusion systems, mod-p cohomology as a Mackey functor, and higher limits
over orbit categories, computed exactly over F_p."""

__version__ = "0.1.0"

from .cohomology import Cohomology, MackeyH, bar_cohomology_dims, mackey_functor, quadratic_action_bound
from .fusion import FusionSystem, realize
from .groups import PermGroup, Subgroup
from .library import SYSTEMS, named_group
from .limits import (
    LimitResult,
    LinearFunctor,
    atomic_filtration,
    higher_limits,
    lambda_,
    lim0_stable_elements,
    radical_chain_criterion,
    verify_vanishing,
)
from .mackey_simple import SimpleSeed, stv_iso, stv_value, w_alpha

__all__ = [
    "Cohomology", "MackeyH", "bar_cohomology_dims", "mackey_functor", "quadratic_action_bound",
    "FusionSystem", "realize", "PermGroup", "Subgroup", "SYSTEMS", "named_group",
    "LimitResult", "LinearFunctor", "atomic_filtration", "higher_limits", "lambda_",
    "lim0_stable_elements", "radical_chain_criterion", "verify_vanishing",
    "SimpleSeed", "stv_iso", "stv_value", "w_alpha",
]
