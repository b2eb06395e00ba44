"""Fair division of indivisible goods when allocations carry a social impact."""
from .model import (
    Allocation,
    Instance,
    InvalidInputError,
    NotApplicableError,
    PoFResult,
    ResourceLimitError,
    agent_impact,
    agent_value,
    common_good_order,
    is_identical,
    is_ordered,
    optimal_welfare,
    pad_with_dummies,
    proportional_share,
    strip_dummies,
    utilitarian_welfare,
)
from .algorithms import ALGORITHMS
from .fairness import full_report
from .oracle import price_of_fairness, predicate, verify_guarantee

__version__ = "0.1.0"
