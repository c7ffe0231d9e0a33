"""PFMEA worksheet computation: effective detection, RPNs and aggregates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .config import AnalysisConfig
from .matcher import MatchResult, process_produces
from .model import EquipmentCatalog, EquipmentFailureMode, Process, Recipe


class ProcessDoesNotProduce(ValueError):
    """Raised when a worksheet is requested for a process that does not produce the recipe."""

    def __init__(self, match: MatchResult):
        self.match = match
        details = "; ".join(v.detail for v in match.violations)
        super().__init__(f"process does not produce recipe: {details}")


@dataclass(frozen=True)
class WorksheetRow:
    process_id: str
    process_step_id: str
    recipe_step_id: str
    service_failure_mode: str
    equipment_failure_mode: str
    severity: int
    occurrence: int
    detection: int
    rpn: int
    covered_by: Optional[str] = None

    @property
    def risk(self) -> int:
        return self.severity * self.occurrence


@dataclass(frozen=True)
class PfmeaWorksheet:
    process_id: str
    rows: Tuple[WorksheetRow, ...] = ()

    @property
    def worst_rpn(self) -> int:
        return max((r.rpn for r in self.rows), default=0)

    @property
    def worst_risk(self) -> int:
        return max((r.risk for r in self.rows), default=0)


def compute_rpn(severity: int, occurrence: int, detection: int) -> int:
    return occurrence * severity * detection


def effective_detection(process: Process, step_index: int,
                        failure_mode: EquipmentFailureMode,
                        catalog: EquipmentCatalog,
                        scale_max: int) -> Tuple[int, Optional[str]]:
    """Best detection among quality-measure steps after ``step_index``.

    Only non-binding steps act as quality measures.  Returns
    ``(scale_max, None)`` when nothing downstream covers the failure mode;
    ties go to the earliest covering step.
    """
    best: Tuple[int, Optional[str]] = (scale_max, None)
    for pstep in process.steps[step_index + 1:]:
        if pstep.binds is not None:
            continue
        es = catalog.service(pstep.uses)
        if es is None or es.quality_measure is None:
            continue
        det = es.quality_measure.detection_for(failure_mode.id)
        if det is None:
            continue
        if best[1] is None or det < best[0]:
            best = (det, pstep.id)
    return best


def analyze_process(process: Process, recipe: Recipe, catalog: EquipmentCatalog,
                    config: AnalysisConfig, check: bool = True) -> PfmeaWorksheet:
    """Build the worksheet for ``process`` producing ``recipe``.

    One row per binding step and equipment failure mode whose service
    failure mode carries a severity in the bound recipe step.  Rows follow
    process order, then service failure-mode id.
    """
    if check:
        match = process_produces(process, recipe, catalog)
        if not match.produces:
            raise ProcessDoesNotProduce(match)

    rows = []
    for index, pstep in enumerate(process.steps):
        if pstep.binds is None:
            continue
        rstep = recipe.step(pstep.binds)
        es = catalog.service(pstep.uses)
        step_rows = []
        for fm in es.failure_modes:
            severity = rstep.severity_of(fm.refers_to)
            if severity is None:
                continue
            detection, covered_by = effective_detection(
                process, index, fm, catalog, config.scale_max)
            step_rows.append(WorksheetRow(
                process_id=process.id,
                process_step_id=pstep.id,
                recipe_step_id=rstep.id,
                service_failure_mode=fm.refers_to,
                equipment_failure_mode=fm.id,
                severity=severity,
                occurrence=fm.occurrence,
                detection=detection,
                rpn=compute_rpn(severity, fm.occurrence, detection),
                covered_by=covered_by,
            ))
        step_rows.sort(key=lambda r: (r.service_failure_mode, r.equipment_failure_mode))
        rows.extend(step_rows)
    return PfmeaWorksheet(process.id, tuple(rows))
