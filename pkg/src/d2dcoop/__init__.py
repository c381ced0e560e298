"""Rate regions and outage performance of a 3-phase cooperative D2D uplink.

Two UEs exchange parts of their messages over a D2D link and beamform them
to the base station; this package evaluates the scheme's achievable rate
region, an outer bound, Rayleigh block-fading outage probabilities, and
four comparison schemes (resource partitioning, concurrent SIC, 2-band FD,
3-band FD), with a Monte-Carlo estimator, parameter search, and a CSV
experiment CLI.
"""

from .channel import (
    LinkState,
    NetworkConfig,
    TransmissionCase,
    case_probability,
    classify_case,
    classify_cases,
    mean_gain,
    sample_block,
    sample_blocks,
)
from .montecarlo import Estimate, EstimatorConfig, estimate_bernoulli, estimate_fields
from .outage import (
    CaseParams,
    Fd2CaseParams,
    Fd2PolicyRule,
    OutageBreakdown,
    OutageTargets,
    RateTargets,
    RpRule,
    SicRule,
    TdPolicyRule,
    average_outage,
    block_outage,
    fd2_block_outage,
    fd3_block_outage,
    outage_rate_region,
)
from .rate_region import (
    Constraint,
    JTerms,
    PhaseSchedule,
    PowerAllocation,
    RateRegion,
    achievable_region,
    ergodic_boundary,
    j_terms,
    max_weighted_sum,
    outer_bound_region,
    redundancy_gap,
)
from .schemes import (
    Fd2Params,
    SchemeKind,
    SchemePolicy,
    case_policy,
    fd2_region,
    fd3_region,
    mac_policy,
    mac_sic_region,
    rp_region,
)
from .search import SearchSpec, ergodic_boundary_points, optimize_outage, optimize_weighted_rate

__version__ = "1.0.0"
