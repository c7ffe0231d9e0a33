"""Design-space exploration over every process that can produce a recipe.

Base processes are the Cartesian product of fulfilling equipment services
per recipe step.  Each base process is then extended with quality measures
until every row whose risk (severity x occurrence) exceeds the risk
threshold is covered, either greedily or by trying every combination of
quality measures up to the insertion budget.  Survivors of the RPN and
budget filters are ranked lexicographically.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from string import ascii_lowercase
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .config import AnalysisConfig
from .economics import EconomicReport, economic_report
from .matcher import service_fulfills
from .model import EquipmentCatalog, EquipmentService, Process, ProcessStep, Recipe
from .pfmea import PfmeaWorksheet, WorksheetRow, analyze_process


class ProducibilityError(ValueError):
    """No equipment service in the catalog fulfills a recipe step."""

    def __init__(self, step_id: str):
        self.step_id = step_id
        super().__init__(f"producibility failure: no equipment fulfills recipe step {step_id!r}")


@dataclass(frozen=True)
class Candidate:
    process: Process
    worksheet: PfmeaWorksheet
    economics: EconomicReport


@dataclass(frozen=True)
class UnreachableQuality:
    process: Process
    worksheet: PfmeaWorksheet
    rows: Tuple[WorksheetRow, ...]
    budget_exhausted: bool = False


@dataclass(frozen=True)
class ExplorationResult:
    ranked: Tuple[Candidate, ...]
    rejected_count: int
    truncated: bool


def fulfilling_services(recipe: Recipe, catalog: EquipmentCatalog) -> List[List[EquipmentService]]:
    options = []
    for step in recipe.steps:
        fits = sorted((es for es in catalog.equipment_services() if service_fulfills(es, step)),
                      key=lambda es: es.id)
        if not fits:
            raise ProducibilityError(step.id)
        options.append(fits)
    return options


def build_process(recipe: Recipe, assignment: Sequence[str],
                  quality_measures: Sequence[str] = ()) -> Process:
    """Process binding ``assignment[i]`` to recipe step ``i``, with the
    given quality measures appended after the last binding step."""
    steps = [ProcessStep(f"p{i}", es_id, rstep.id)
             for i, (rstep, es_id) in enumerate(zip(recipe.steps, assignment), start=1)]
    n = len(steps)
    steps += [ProcessStep(f"p{n}{_suffix(k)}", qm_id) for k, qm_id in enumerate(quality_measures)]
    pid = f"{recipe.id}:" + ".".join(assignment)
    if quality_measures:
        pid += "+" + "+".join(quality_measures)
    return Process(pid, tuple(steps))


def _suffix(k: int) -> str:
    out = ""
    k += 1
    while k:
        k, rem = divmod(k - 1, 26)
        out = ascii_lowercase[rem] + out
    return out


def _iter_base_processes(recipe: Recipe, catalog: EquipmentCatalog) -> Iterator[Process]:
    options = fulfilling_services(recipe, catalog)
    for combo in itertools.product(*options):
        yield build_process(recipe, [es.id for es in combo])


def enumerate_base_processes(recipe: Recipe, catalog: EquipmentCatalog,
                             limit: Optional[int] = None) -> List[Process]:
    return list(itertools.islice(_iter_base_processes(recipe, catalog), limit))


def insert_quality_measure(process: Process, qm_id: str) -> Process:
    """Insert ``qm_id`` right after the last binding step."""
    last = max(i for i, s in enumerate(process.steps) if s.binds is not None)
    used = {s.id for s in process.steps}
    base = process.steps[last].id
    k = 0
    while f"{base}{_suffix(k)}" in used:
        k += 1
    step = ProcessStep(f"{base}{_suffix(k)}", qm_id)
    steps = process.steps[:last + 1] + (step,) + process.steps[last + 1:]
    return Process(f"{process.id}+{qm_id}", steps)


def risky_uncovered(worksheet: PfmeaWorksheet, config: AnalysisConfig) -> List[WorksheetRow]:
    return [r for r in worksheet.rows
            if r.risk > config.risk_threshold and r.detection == config.scale_max]


def _best_cover(catalog: EquipmentCatalog, fm_id: str,
                scale_max: int) -> Optional[EquipmentService]:
    best = None
    for qm in catalog.quality_measures():
        det = qm.quality_measure.detection_for(fm_id)
        if det is None or det >= scale_max:
            continue
        key = (det, qm.cost, qm.id)
        if best is None or key < best[0]:
            best = (key, qm)
    return best[1] if best else None


def improve_until_threshold(candidate: Candidate, recipe: Recipe, catalog: EquipmentCatalog,
                            config: AnalysisConfig) -> Union[Candidate, UnreachableQuality]:
    """Greedily insert the best-detecting covering measure for each row
    over the risk threshold that nothing covers yet."""
    process, worksheet = candidate.process, candidate.worksheet
    inserted = 0
    hopeless: List[WorksheetRow] = []
    exhausted = False
    while True:
        skip = {r.equipment_failure_mode for r in hopeless}
        pending = [r for r in risky_uncovered(worksheet, config)
                   if r.equipment_failure_mode not in skip]
        if not pending:
            break
        row = pending[0]
        qm = _best_cover(catalog, row.equipment_failure_mode, config.scale_max)
        if qm is None:
            hopeless.append(row)
            continue
        if inserted >= config.max_quality_measures:
            exhausted = True
            hopeless.append(row)
            break
        process = insert_quality_measure(process, qm.id)
        inserted += 1
        worksheet = analyze_process(process, recipe, catalog, config, check=False)

    if hopeless:
        return UnreachableQuality(process, worksheet,
                                  tuple(risky_uncovered(worksheet, config)), exhausted)
    if process is candidate.process:
        return candidate
    return Candidate(process, worksheet,
                     economic_report(process, worksheet, recipe, catalog, config))


def evaluate(process: Process, recipe: Recipe, catalog: EquipmentCatalog,
             config: AnalysisConfig) -> Candidate:
    worksheet = analyze_process(process, recipe, catalog, config, check=False)
    return Candidate(process, worksheet,
                     economic_report(process, worksheet, recipe, catalog, config))


def passes_filters(candidate: Candidate, config: AnalysisConfig) -> bool:
    return (candidate.worksheet.worst_rpn <= config.rpn_threshold
            and candidate.economics.within_budget)


def _sort_key(candidate: Candidate, criteria: Sequence[str]):
    key = []
    for name in criteria:
        if name == "worst_rpn":
            key.append(candidate.worksheet.worst_rpn)
        elif name == "expected_cost":
            key.append(candidate.economics.expected_cost_per_accepted)
        else:
            duration = candidate.economics.duration
            key.append(math.inf if duration is None else duration)
    key.append(candidate.process.id)
    return tuple(key)


def rank_processes(candidates: Sequence[Candidate], config: AnalysisConfig) -> List[Candidate]:
    return sorted(candidates, key=lambda c: _sort_key(c, config.ranking_criteria))


def _explore_one(base: Process, recipe: Recipe, catalog: EquipmentCatalog,
                 config: AnalysisConfig) -> Tuple[List[Candidate], int]:
    if config.exhaustive_qm:
        qm_ids = [qm.id for qm in catalog.quality_measures()]
        assignment = [s.uses for s in base.steps]
        kept, rejected = [], 0
        for k in range(config.max_quality_measures + 1):
            for combo in itertools.combinations(qm_ids, k):
                cand = evaluate(build_process(recipe, assignment, combo), recipe, catalog, config)
                if not risky_uncovered(cand.worksheet, config) and passes_filters(cand, config):
                    kept.append(cand)
                else:
                    rejected += 1
        return kept, rejected

    improved = improve_until_threshold(evaluate(base, recipe, catalog, config),
                                       recipe, catalog, config)
    if isinstance(improved, UnreachableQuality) or not passes_filters(improved, config):
        return [], 1
    return [improved], 0


def explore(recipe: Recipe, catalog: EquipmentCatalog, config: AnalysisConfig,
            workers: int = 1) -> ExplorationResult:
    """Enumerate, improve, filter and rank all processes for ``recipe``.

    ``workers > 1`` evaluates base processes on a thread pool; results are
    merged and sorted, so the outcome does not depend on scheduling.
    """
    stream = _iter_base_processes(recipe, catalog)
    bases = list(itertools.islice(stream, config.max_processes))
    truncated = next(stream, None) is not None

    def work(base):
        return _explore_one(base, recipe, catalog, config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, bases))
    else:
        outcomes = [work(b) for b in bases]

    survivors = [c for kept, _ in outcomes for c in kept]
    rejected = sum(r for _, r in outcomes)
    return ExplorationResult(tuple(rank_processes(survivors, config)), rejected, truncated)
