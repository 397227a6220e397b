"""Multicast subgrouping over a shared HSDPA downlink: link model, metrics,
planning policies and a Monte Carlo campaign runner.

The package answers one question: given the channel-quality levels a
multicast group reports, which per-level transmissions should the cell enable
so that the group's average rate loss is smallest within the channelization
code budget? Three policies answer it (one conservative, one population
driven, one exact optimizer) and the simulator compares them under a common
cell model.
"""

from ._kernels import BACKEND
from .cqi import CqiEntry, CqiTable, Modulation, load_table, validate
from .errors import ConfigurationError, PlanningError, TableError
from .linkmodel import (
    CellLayout,
    FadingMode,
    LinkBudget,
    LinkConfig,
    PropagationConfig,
    SinrCqiMap,
    geometry_factor,
    path_loss_db,
    sample_channel,
    sinr,
    sinr_db,
    sinr_to_cqi,
)
from .policies import (
    GbParams,
    Policy,
    SubgroupLevel,
    SubgroupPlan,
    brute_force_plan,
    build_plan,
    group_based_plan,
    optimized_plan,
    single_group_plan,
)
from .satisfaction import (
    DissatisfactionReport,
    admitted_rate,
    admitted_rates,
    codes_used,
    group_report,
    user_dissatisfaction,
)
from .scenario import (
    CampaignResult,
    RunMetrics,
    ScenarioConfig,
    config_from_flat,
    config_to_flat,
    run_campaign,
    run_drop,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CampaignResult",
    "CellLayout",
    "ConfigurationError",
    "CqiEntry",
    "CqiTable",
    "DissatisfactionReport",
    "FadingMode",
    "GbParams",
    "LinkBudget",
    "LinkConfig",
    "Modulation",
    "PlanningError",
    "Policy",
    "PropagationConfig",
    "RunMetrics",
    "ScenarioConfig",
    "SinrCqiMap",
    "SubgroupLevel",
    "SubgroupPlan",
    "TableError",
    "admitted_rate",
    "admitted_rates",
    "brute_force_plan",
    "build_plan",
    "codes_used",
    "config_from_flat",
    "config_to_flat",
    "geometry_factor",
    "group_based_plan",
    "group_report",
    "load_table",
    "optimized_plan",
    "path_loss_db",
    "run_campaign",
    "run_drop",
    "sample_channel",
    "single_group_plan",
    "sinr",
    "sinr_db",
    "sinr_to_cqi",
    "user_dissatisfaction",
    "validate",
]
