"""Truncated sequential probability ratio tests with calibrated termination.

A Wald sequential test is capped at a maximum sample size; the terminal
likelihood-ratio threshold is calibrated (by simulation or, for
proportions, exactly) so the overall size stays at the nominal level.
"""

from .alternatives import (
    DataDependentTAlt,
    MixtureAlt,
    PointAlt,
    derive_alternative,
    point_umpbt_one_prop,
    prop_cutoff,
    umpbt_one_prop,
    umpbt_one_t,
    umpbt_one_z,
    umpbt_two_t,
    umpbt_two_z,
)
from .design import (
    DesignResult,
    OCResult,
    cost_multiple,
    design,
    effective_n,
    find_n_star,
    fixed_design_alt,
    oc,
)
from .dists import RngSeed
from .dp import design_exact_prop, oc_exact_prop
from .engine import (
    Decision,
    DecisionCause,
    DecisionKind,
    TwoSidedTrial,
    new_trial,
    run_batch,
    step,
)
from .likelihood import TrialState, TrialStatus, compute_log_lr, update
from .spec import (
    DegenerateSampleError,
    Family,
    InfeasibleDesignError,
    Side,
    SpecError,
    TestSpec,
    UsageError,
    WaldBoundaries,
)

__version__ = "1.0.0"

__all__ = [
    "DataDependentTAlt", "MixtureAlt", "PointAlt", "derive_alternative",
    "point_umpbt_one_prop", "prop_cutoff", "umpbt_one_prop", "umpbt_one_t",
    "umpbt_one_z", "umpbt_two_t", "umpbt_two_z",
    "DesignResult", "OCResult", "cost_multiple", "design", "effective_n",
    "find_n_star", "fixed_design_alt", "oc",
    "RngSeed", "design_exact_prop", "oc_exact_prop",
    "Decision", "DecisionCause", "DecisionKind", "TwoSidedTrial",
    "new_trial", "run_batch", "step",
    "TrialState", "TrialStatus", "compute_log_lr", "update",
    "DegenerateSampleError", "Family", "InfeasibleDesignError", "Side",
    "SpecError", "TestSpec", "UsageError", "WaldBoundaries",
]
