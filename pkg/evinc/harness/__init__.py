"""
Проверочные кампании, независимый перебор ветвей и итерация неподвижной точки
"""
from evinc.harness.campaign import (
    CampaignReport,
    CampaignRow,
    CheckSummary,
    PropertyCampaign,
    replay_seed,
    replay_trial,
    run_campaign,
    trial_seed,
)
from evinc.harness.checks import CHECKS, CheckName, CheckOutcome, run_check
from evinc.harness.fixed_point import (
    fixed_point_bound,
    fixed_point_iterates,
    solution_lipschitz_bound,
    tail_within_bound,
)
from evinc.harness.forcing import prefix_pair, random_forcing
from evinc.harness.oracle import oracle_step, oracle_trajectory

__all__ = [
    "CampaignReport",
    "CampaignRow",
    "CheckSummary",
    "PropertyCampaign",
    "replay_seed",
    "replay_trial",
    "run_campaign",
    "trial_seed",
    "CHECKS",
    "CheckName",
    "CheckOutcome",
    "run_check",
    "fixed_point_bound",
    "fixed_point_iterates",
    "solution_lipschitz_bound",
    "tail_within_bound",
    "prefix_pair",
    "random_forcing",
    "oracle_step",
    "oracle_trajectory",
]
