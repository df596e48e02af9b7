"""Exact simulation of directed sequences of monomial local quadratic transforms."""

from .checks import CheckResult, explain, list_checks, run_checks
from .errors import (
    AmbiguousDirection,
    BasisMismatch,
    ConfigError,
    DirectionNotMinimal,
    EmptyGeneratorSet,
    IncompleteCoverage,
    IndeterminateComparison,
    IndexOutOfRange,
    KilledDirectionUsed,
    NonPositiveValue,
    NotTerminated,
    QuadseqError,
    RatioUndefined,
    UnknownCheck,
)
from .forms import (
    MonomialForm,
    comparability_index,
    order_drop_report,
    power_bracketing_report,
    ratio_limit_report,
)
from .gallery import (
    PlanStep,
    Scenario,
    TermGroup,
    build_preset,
    list_presets,
    replay_states,
    run_scenario,
)
from .monomials import (
    MonomialIdeal,
    extend_ideal,
    monomial_value,
    rewrite_monomial,
    rewrite_word,
    transform_ideal,
    transform_word,
)
from .sequence import ParameterFrame, SequenceState
from .values import RealBasis, ValueVector, value_cmp
from .videals import (
    enumerate_values,
    ideal_value,
    membership_index,
    short_chain_report,
    tau_bound,
    value_ladder,
    videal_at,
    videal_chain,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousDirection",
    "BasisMismatch",
    "CheckResult",
    "ConfigError",
    "DirectionNotMinimal",
    "EmptyGeneratorSet",
    "IncompleteCoverage",
    "IndeterminateComparison",
    "IndexOutOfRange",
    "KilledDirectionUsed",
    "MonomialForm",
    "MonomialIdeal",
    "NonPositiveValue",
    "NotTerminated",
    "ParameterFrame",
    "PlanStep",
    "QuadseqError",
    "RatioUndefined",
    "RealBasis",
    "Scenario",
    "SequenceState",
    "TermGroup",
    "UnknownCheck",
    "ValueVector",
    "build_preset",
    "comparability_index",
    "enumerate_values",
    "explain",
    "extend_ideal",
    "ideal_value",
    "list_checks",
    "list_presets",
    "membership_index",
    "monomial_value",
    "order_drop_report",
    "power_bracketing_report",
    "ratio_limit_report",
    "replay_states",
    "rewrite_monomial",
    "rewrite_word",
    "run_checks",
    "run_scenario",
    "short_chain_report",
    "tau_bound",
    "transform_ideal",
    "transform_word",
    "value_cmp",
    "value_ladder",
    "videal_at",
    "videal_chain",
]
