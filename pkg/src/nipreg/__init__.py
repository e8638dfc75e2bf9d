"""Exact invariants and structure/regularity witnesses for subsets of finite groups."""

from .errors import (
    BudgetExceeded,
    CorrectionFailed,
    InputError,
    InternalCheckFailed,
    NipregError,
    SizeLimit,
)
from .groups import (
    FiniteGroup,
    GroupSubset,
    Subgroup,
    build_group,
    density,
    normal_subgroups_up_to_index,
    quotient,
)
from .abelian import abelianization
from .vc import TranslateSystem, is_k_nip, order_pattern, stability_order, vc_dimension

__version__ = "0.1.0"
