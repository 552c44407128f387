"""
Кампании проверок: независимые испытания, сид испытания из (seed, trial)
evinc/harness/campaign.py
"""
import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from evinc.config import settings
from evinc.exceptions import ContractViolation
from evinc.harness.checks import CheckName, CheckOutcome, run_check
from evinc.solver.problem import InclusionProblem
from evinc.utils.constants import CAMPAIGN_COLUMNS
from evinc.utils.helpers import format_float, format_key_values

logger = logging.getLogger(__name__)

ProblemBuilder = Callable[[], InclusionProblem]


class PropertyCampaign(BaseModel):
    """
    Args:
        problem: построитель задачи; вызывается один раз на испытание
        tolerances: переопределение допуска по имени проверки
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    problem: ProblemBuilder
    trials: int = Field(ge=0)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0)
    checks: Tuple[CheckName, ...] = tuple(CheckName)
    tolerances: Dict[CheckName, float] = {}
    workers: int = Field(default_factory=lambda: settings.CAMPAIGN_WORKERS, ge=1)
    name: str = "campaign"


class CampaignRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    trial: int
    check: CheckName
    passed: bool
    margin: float
    seed: int
    detail: str = ""

    def as_csv(self) -> List[str]:
        return [
            str(self.trial),
            self.check.value,
            "true" if self.passed else "false",
            format_float(self.margin),
            str(self.seed),
            self.detail,
        ]


class CheckSummary(BaseModel):
    check: CheckName
    runs: int
    passed: int
    worst_margin: float
    failing_seeds: List[int]


class CampaignReport(BaseModel):
    name: str
    seed: int
    trials: int
    checks: Tuple[CheckName, ...]
    rows: List[CampaignRow]

    @property
    def failures(self) -> List[CampaignRow]:
        return [row for row in self.rows if not row.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summaries(self) -> List[CheckSummary]:
        result = []
        for check in self.checks:
            rows = [row for row in self.rows if row.check is check]
            margins = [row.margin for row in rows if not math.isnan(row.margin)]
            result.append(
                CheckSummary(
                    check=check,
                    runs=len(rows),
                    passed=sum(row.passed for row in rows),
                    worst_margin=min(margins) if margins else math.nan,
                    failing_seeds=[row.seed for row in rows if not row.passed],
                )
            )
        return result

    def summary_text(self) -> str:
        pairs: Dict[str, object] = {
            "campaign": self.name,
            "seed": self.seed,
            "trials": self.trials,
            "rows": len(self.rows),
            "failures": len(self.failures),
            "passed": self.passed,
        }
        for summary in self.summaries():
            key = summary.check.value
            pairs[f"{key}.passed"] = f"{summary.passed}/{summary.runs}"
            pairs[f"{key}.worst_margin"] = summary.worst_margin
            pairs[f"{key}.failing_seeds"] = summary.failing_seeds or "none"
        return format_key_values(pairs)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CAMPAIGN_COLUMNS)
            for row in self.rows:
                writer.writerow(row.as_csv())
        return path


def trial_seed(seed: int, trial: int) -> int:
    """Сид испытания из SeedSequence([seed, trial])"""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint64)[0])


def _run_trial(campaign: PropertyCampaign, trial: int) -> List[CampaignRow]:
    seed = trial_seed(campaign.seed, trial)
    problem = campaign.problem()
    rows = []
    for check in campaign.checks:
        outcome: CheckOutcome = run_check(
            check, problem, np.random.default_rng(seed), campaign.tolerances.get(check)
        )
        if not outcome.passed:
            logger.warning(f"⚠️ {campaign.name}: trial {trial} failed {check.value} (seed {seed}, {outcome.detail})")
        rows.append(
            CampaignRow(
                trial=trial,
                check=check,
                passed=outcome.passed,
                margin=outcome.margin,
                seed=seed,
                detail=outcome.detail,
            )
        )
    return rows


def run_campaign(campaign: PropertyCampaign) -> CampaignReport:
    """Строки отсортированы по (trial, порядок проверок), результат не зависит от числа потоков"""
    logger.info(
        f"🚀 Campaign {campaign.name}: {campaign.trials} trials, checks {[c.value for c in campaign.checks]}, "
        f"seed {campaign.seed}"
    )
    trials = range(campaign.trials)
    if campaign.workers > 1 and campaign.trials > 1:
        with ThreadPoolExecutor(max_workers=campaign.workers) as pool:
            batches = list(pool.map(lambda trial: _run_trial(campaign, trial), trials))
    else:
        batches = [_run_trial(campaign, trial) for trial in trials]
    order = {check: index for index, check in enumerate(campaign.checks)}
    rows = sorted((row for batch in batches for row in batch), key=lambda row: (row.trial, order[row.check]))
    report = CampaignReport(
        name=campaign.name, seed=campaign.seed, trials=campaign.trials, checks=campaign.checks, rows=rows
    )
    if report.passed:
        logger.info(f"✅ Campaign {campaign.name}: {len(rows)} rows passed")
    else:
        logger.warning(f"⚠️ Campaign {campaign.name}: {len(report.failures)} of {len(rows)} rows failed")
    return report


def replay_trial(campaign: PropertyCampaign, check: CheckName, trial: int) -> CampaignRow:
    """Повтор одной строки кампании по её сиду"""
    check = CheckName(check)
    if check not in campaign.checks:
        raise ContractViolation(f"check {check.value} is not part of campaign {campaign.name}")
    if not 0 <= trial < campaign.trials:
        raise ContractViolation(f"trial {trial} outside 0..{campaign.trials - 1}")
    seed = trial_seed(campaign.seed, trial)
    outcome = run_check(check, campaign.problem(), np.random.default_rng(seed), campaign.tolerances.get(check))
    return CampaignRow(
        trial=trial, check=check, passed=outcome.passed, margin=outcome.margin, seed=seed, detail=outcome.detail
    )


def replay_seed(problem: InclusionProblem, check: CheckName, seed: int, tolerance: Optional[float] = None) -> CheckOutcome:
    """Проверка по записанному сиду без объекта кампании"""
    return run_check(CheckName(check), problem, np.random.default_rng(seed), tolerance)
