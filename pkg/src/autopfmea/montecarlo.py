"""Item-by-item production simulation used as an independent check on the
analytic economics.

The simulation reads the rating-to-probability maps straight from the
config and never calls into the economics module.  Random numbers come from
numpy's PCG64 generator seeded with the caller's seed; items are simulated
in fixed-size chunks drawn sequentially from that one stream, so a seed
fully determines the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .config import AnalysisConfig
from .model import EquipmentCatalog, Process
from .pfmea import PfmeaWorksheet

CHUNK = 200_000
SIGMA_LIMIT = 4.0


@dataclass(frozen=True)
class SimulationStats:
    items: int
    rejected: int
    escaped: int  # shipped with at least one undetected defect
    undetected: int  # at least one undetected defect, shipped or not
    total_cost: float
    seed: int

    @property
    def rejection_rate(self) -> float:
        return self.rejected / self.items

    @property
    def undetected_rate(self) -> float:
        return self.undetected / self.items


@dataclass(frozen=True)
class RateCheck:
    name: str
    analytic: float
    empirical: float
    sigma: float
    flagged: bool


@dataclass(frozen=True)
class ComparisonReport:
    checks: Tuple[RateCheck, ...]

    @property
    def flags(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.checks if c.flagged)

    @property
    def ok(self) -> bool:
        return not self.flags


def simulate(process: Process, worksheet: PfmeaWorksheet, catalog: EquipmentCatalog,
             config: AnalysisConfig, items: int, seed: int) -> SimulationStats:
    if items < 1:
        raise ValueError("items must be at least 1")
    p_occ = np.array([config.occurrence_probability[r.occurrence] for r in worksheet.rows])
    p_catch = np.array([config.catch_probability[r.detection] for r in worksheet.rows])
    unit_cost = math.fsum(catalog.service(s.uses).cost for s in process.steps)

    rng = np.random.default_rng(seed)
    rejected = escaped = undetected = 0
    done = 0
    while done < items:
        n = min(CHUNK, items - done)
        done += n
        if not len(p_occ):
            continue
        fired = rng.random((n, len(p_occ))) < p_occ
        caught = fired & (rng.random((n, len(p_occ))) < p_catch)
        missed = fired & ~caught
        item_rejected = caught.any(axis=1)
        item_missed = missed.any(axis=1)
        rejected += int(item_rejected.sum())
        undetected += int(item_missed.sum())
        escaped += int((item_missed & ~item_rejected).sum())
    return SimulationStats(items, rejected, escaped, undetected, items * unit_cost, seed)


def _check(name: str, analytic: float, hits: int, items: int) -> RateCheck:
    empirical = hits / items
    sigma = math.sqrt(max(analytic * (1.0 - analytic), 0.0) / items)
    if sigma == 0.0:
        flagged = empirical != analytic
    else:
        flagged = abs(empirical - analytic) > SIGMA_LIMIT * sigma
    return RateCheck(name, analytic, empirical, sigma, flagged)


def compare_with_analytic(stats: SimulationStats, report) -> ComparisonReport:
    """Flag rates whose simulated estimate sits more than 4 binomial sigmas
    from the analytic value.

    The analytic escape rate counts items carrying any undetected defect,
    whether or not another defect got them rejected, so it is compared
    against ``stats.undetected``.
    """
    return ComparisonReport((
        _check("rejection_rate", report.rejection_rate, stats.rejected, stats.items),
        _check("escape_rate", report.escape_rate, stats.undetected, stats.items),
    ))
