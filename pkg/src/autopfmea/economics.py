"""Rejection, escape and cost-per-accepted-item figures for an analyzed process.

Each worksheet row is treated as an independent defect source.  A defect
fires with the occurrence probability of its rating and is caught with the
catch probability of its detection rating.  Any caught defect scraps the
item; there is no rework.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .config import AnalysisConfig
from .model import EquipmentCatalog, Process, Recipe
from .pfmea import PfmeaWorksheet


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class EconomicReport:
    attempt_cost: float
    rejection_rate: float
    escape_rate: float
    expected_cost_per_accepted: float
    within_budget: bool
    duration: Optional[float] = None


def occurrence_probability(rating: int, config: AnalysisConfig) -> float:
    return config.occurrence_probability[rating]


def catch_probability(rating: int, config: AnalysisConfig) -> float:
    return config.catch_probability[rating]


def economic_report(process: Process, worksheet: PfmeaWorksheet, recipe: Recipe,
                    catalog: EquipmentCatalog, config: AnalysisConfig) -> EconomicReport:
    services = [catalog.service(s.uses) for s in process.steps]
    attempt_cost = math.fsum(es.cost for es in services)
    durations = [es.duration for es in services]
    duration = None if any(d is None for d in durations) else sum(durations)

    keep_clean = 1.0
    keep_unescaped = 1.0
    for row in worksheet.rows:
        p_occ = occurrence_probability(row.occurrence, config)
        p_catch = catch_probability(row.detection, config)
        keep_clean *= 1.0 - p_occ * p_catch
        keep_unescaped *= 1.0 - p_occ * (1.0 - p_catch)
    rejection_rate = 1.0 - keep_clean
    escape_rate = 1.0 - keep_unescaped

    if rejection_rate >= 1.0:
        raise DegenerateInputError(
            f"process {process.id!r} rejects every item; cost per accepted item is undefined")
    expected = attempt_cost / (1.0 - rejection_rate)
    return EconomicReport(
        attempt_cost=attempt_cost,
        rejection_rate=rejection_rate,
        escape_rate=escape_rate,
        expected_cost_per_accepted=expected,
        within_budget=expected <= recipe.budget or math.isinf(recipe.budget),
        duration=duration,
    )
