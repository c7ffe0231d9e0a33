"""Domain types for model-based PFMEA and their referential-integrity checks.

Every entity is a frozen dataclass.  Cross references are plain identifier
strings that resolve through the owning container (``ServiceLibrary``,
``EquipmentCatalog``, ``Recipe``).  Validation never raises: it returns a
``ValidationReport`` whose findings are ordinary data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple, Union

PropertyValue = Union[bool, int, float, str]

PROPERTY_KINDS = ("numeric", "enumeration", "boolean")
QUALITY_MEASURE_KINDS = ("inspection", "measurement", "correction", "rejection")
DEFAULT_SCALE_MAX = 10


# ---------------------------------------------------------------------------
# service library
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ServiceProperty:
    name: str
    kind: str
    unit: Optional[str] = None
    values: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ServiceFailureMode:
    id: str
    description: str = ""


@dataclass(frozen=True)
class Service:
    id: str
    name: str
    properties: Tuple[ServiceProperty, ...] = ()
    failure_modes: Tuple[ServiceFailureMode, ...] = ()

    def property(self, name: str) -> Optional[ServiceProperty]:
        for prop in self.properties:
            if prop.name == name:
                return prop
        return None

    def failure_mode_ids(self) -> Tuple[str, ...]:
        return tuple(fm.id for fm in self.failure_modes)


@dataclass(frozen=True)
class ServiceLibrary:
    services: Tuple[Service, ...] = ()

    def get(self, service_id: str) -> Optional[Service]:
        for service in self.services:
            if service.id == service_id:
                return service
        return None


# ---------------------------------------------------------------------------
# equipment catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquipmentPropertyConstraint:
    """Limit on one service property.

    Exactly one predicate group is populated: ``min``/``max`` (inclusive
    numeric range), ``allowed`` (enumeration subset) or ``expected``
    (boolean equality).
    """

    property: str
    min: Optional[float] = None
    max: Optional[float] = None
    allowed: Optional[Tuple[str, ...]] = None
    expected: Optional[bool] = None

    @property
    def kind(self) -> str:
        if self.allowed is not None:
            return "enumSubset"
        if self.expected is not None:
            return "booleanEquals"
        return "numericRange"


@dataclass(frozen=True)
class EquipmentFailureMode:
    id: str
    refers_to: str
    occurrence: int


@dataclass(frozen=True)
class CoveredFailureMode:
    equipment_failure_mode: str
    detection: int


@dataclass(frozen=True)
class QualityMeasureSpec:
    kind: str
    covers: Tuple[CoveredFailureMode, ...]

    def detection_for(self, equipment_failure_mode: str) -> Optional[int]:
        ratings = [c.detection for c in self.covers
                   if c.equipment_failure_mode == equipment_failure_mode]
        return min(ratings) if ratings else None


@dataclass(frozen=True)
class EquipmentService:
    id: str
    fulfills: str
    cost: float = 0.0
    duration: Optional[float] = None
    constraints: Tuple[EquipmentPropertyConstraint, ...] = ()
    failure_modes: Tuple[EquipmentFailureMode, ...] = ()
    quality_measure: Optional[QualityMeasureSpec] = None

    @property
    def is_quality_measure(self) -> bool:
        return self.quality_measure is not None


@dataclass(frozen=True)
class Equipment:
    id: str
    name: str
    services: Tuple[EquipmentService, ...] = ()


@dataclass(frozen=True)
class EquipmentCatalog:
    equipment: Tuple[Equipment, ...] = ()
    _index: Dict[str, EquipmentService] = field(
        default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index: Dict[str, EquipmentService] = {}
        for es in self.equipment_services():
            index.setdefault(es.id, es)
        object.__setattr__(self, "_index", index)

    def equipment_services(self) -> Iterator[EquipmentService]:
        for eq in self.equipment:
            yield from eq.services

    def service(self, service_id: str) -> Optional[EquipmentService]:
        return self._index.get(service_id)

    def quality_measures(self) -> List[EquipmentService]:
        """Quality-measure equipment services sorted by id."""
        return sorted((es for es in self._index.values() if es.is_quality_measure),
                      key=lambda es: es.id)

    def failure_mode(self, fm_id: str) -> Optional[EquipmentFailureMode]:
        for es in self.equipment_services():
            for fm in es.failure_modes:
                if fm.id == fm_id:
                    return fm
        return None


# ---------------------------------------------------------------------------
# recipe and process
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecipeStepFailureMode:
    belongs_to: str
    severity: int


@dataclass(frozen=True)
class RecipeStep:
    id: str
    addresses: str
    property_values: Tuple[Tuple[str, PropertyValue], ...] = ()
    failure_modes: Tuple[RecipeStepFailureMode, ...] = ()

    def value(self, name: str):
        for key, value in self.property_values:
            if key == name:
                return value
        return None

    def has_value(self, name: str) -> bool:
        return any(key == name for key, _ in self.property_values)

    def severity_of(self, service_failure_mode: str) -> Optional[int]:
        for fm in self.failure_modes:
            if fm.belongs_to == service_failure_mode:
                return fm.severity
        return None


@dataclass(frozen=True)
class Recipe:
    id: str
    steps: Tuple[RecipeStep, ...]
    budget: float = math.inf

    def step(self, step_id: str) -> Optional[RecipeStep]:
        for step in self.steps:
            if step.id == step_id:
                return step
        return None


@dataclass(frozen=True)
class ProcessStep:
    id: str
    uses: str
    binds: Optional[str] = None


@dataclass(frozen=True)
class Process:
    id: str
    steps: Tuple[ProcessStep, ...]

    def binding_steps(self) -> List[ProcessStep]:
        return [s for s in self.steps if s.binds is not None]


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    entity: str
    field: str
    message: str

    def __str__(self):
        return f"{self.entity}.{self.field}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: Tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    def __iter__(self):
        return iter(self.findings)

    def __len__(self):
        return len(self.findings)

    def __add__(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(self.findings + other.findings)


def _duplicates(ids) -> List[str]:
    seen, dupes = set(), []
    for i in ids:
        if i in seen and i not in dupes:
            dupes.append(i)
        seen.add(i)
    return dupes


def _rating_ok(value, scale_max: int) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and 1 <= value <= scale_max


def _value_matches_kind(value, prop: ServiceProperty) -> bool:
    if prop.kind == "boolean":
        return isinstance(value, bool)
    if prop.kind == "numeric":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, str) and value in prop.values


def validate_library(library: ServiceLibrary) -> ValidationReport:
    out: List[Finding] = []
    for dup in _duplicates(s.id for s in library.services):
        out.append(Finding(dup, "id", f"duplicate service id {dup!r}"))
    for service in library.services:
        for dup in _duplicates(p.name for p in service.properties):
            out.append(Finding(service.id, "properties", f"duplicate property {dup!r}"))
        for dup in _duplicates(fm.id for fm in service.failure_modes):
            out.append(Finding(service.id, "failure_modes", f"duplicate failure mode {dup!r}"))
        for prop in service.properties:
            where = f"{service.id}.{prop.name}"
            if prop.kind not in PROPERTY_KINDS:
                out.append(Finding(where, "kind", f"unknown property kind {prop.kind!r}"))
            elif prop.kind == "enumeration" and not prop.values:
                out.append(Finding(where, "values", "enumeration value set is empty"))
            elif prop.kind == "numeric" and not (prop.unit or "").strip():
                out.append(Finding(where, "unit", "numeric property needs a unit"))
    return ValidationReport(tuple(out))


def _check_constraint(owner: str, c: EquipmentPropertyConstraint,
                      service: Service) -> List[Finding]:
    where = f"{owner}.{c.property}"
    prop = service.property(c.property)
    if prop is None:
        return [Finding(where, "property",
                        f"property {c.property!r} not declared on service {service.id!r}")]
    out = []
    expected_kind = {"numeric": "numericRange", "enumeration": "enumSubset",
                     "boolean": "booleanEquals"}.get(prop.kind)
    if c.kind != expected_kind:
        out.append(Finding(where, "predicate",
                           f"{c.kind} predicate on {prop.kind} property"))
    elif c.kind == "numericRange":
        if c.min is None and c.max is None:
            out.append(Finding(where, "predicate", "numeric range needs at least one bound"))
        elif c.min is not None and c.max is not None and c.min > c.max:
            out.append(Finding(where, "predicate", f"min {c.min} exceeds max {c.max}"))
    elif c.kind == "enumSubset":
        unknown = [v for v in c.allowed if v not in prop.values]
        if unknown:
            out.append(Finding(where, "allowed", f"values not in enumeration: {unknown}"))
    return out


def validate_catalog(catalog: EquipmentCatalog, library: ServiceLibrary,
                     scale_max: int = DEFAULT_SCALE_MAX) -> ValidationReport:
    """Check catalog invariants and every reference into ``library``.

    Equipment-service ids and equipment failure-mode ids must be unique
    across the whole catalog, since processes and quality measures refer to
    them without qualification.
    """
    out: List[Finding] = []
    for dup in _duplicates(e.id for e in catalog.equipment):
        out.append(Finding(dup, "id", f"duplicate equipment id {dup!r}"))
    services = list(catalog.equipment_services())
    for dup in _duplicates(es.id for es in services):
        out.append(Finding(dup, "id", f"duplicate equipment service id {dup!r}"))
    fm_ids = [fm.id for es in services for fm in es.failure_modes]
    for dup in _duplicates(fm_ids):
        out.append(Finding(dup, "id", f"duplicate equipment failure mode id {dup!r}"))
    known_fms = set(fm_ids)

    for eq in catalog.equipment:
        if not eq.services:
            out.append(Finding(eq.id, "services", "equipment provides no service"))
        for es in eq.services:
            where = f"{eq.id}.{es.id}"
            if es.cost < 0 or math.isnan(es.cost):
                out.append(Finding(where, "cost", "cost must be nonnegative"))
            if es.duration is not None and not es.duration >= 0:
                out.append(Finding(where, "duration", "duration must be nonnegative"))
            service = library.get(es.fulfills)
            if service is None:
                out.append(Finding(where, "fulfills", f"unresolved service {es.fulfills!r}"))
            else:
                for c in es.constraints:
                    out.extend(_check_constraint(where, c, service))
                declared = set(service.failure_mode_ids())
                for fm in es.failure_modes:
                    if fm.refers_to not in declared:
                        out.append(Finding(f"{where}.{fm.id}", "refers_to",
                                           f"unresolved service failure mode {fm.refers_to!r} "
                                           f"of service {service.id!r}"))
            for fm in es.failure_modes:
                if not _rating_ok(fm.occurrence, scale_max):
                    out.append(Finding(f"{where}.{fm.id}", "occurrence",
                                       f"rating {fm.occurrence!r} outside [1, {scale_max}]"))
            qm = es.quality_measure
            if qm is not None:
                if qm.kind not in QUALITY_MEASURE_KINDS:
                    out.append(Finding(where, "quality_measure.kind",
                                       f"unknown quality measure kind {qm.kind!r}"))
                if not qm.covers:
                    out.append(Finding(where, "quality_measure.covers", "covers nothing"))
                for cov in qm.covers:
                    if cov.equipment_failure_mode not in known_fms:
                        out.append(Finding(where, "quality_measure.covers",
                                           f"unresolved equipment failure mode "
                                           f"{cov.equipment_failure_mode!r}"))
                    if not _rating_ok(cov.detection, scale_max):
                        out.append(Finding(where, "quality_measure.covers",
                                           f"detection {cov.detection!r} outside [1, {scale_max}]"))
    return ValidationReport(tuple(out))


def validate_recipe(recipe: Recipe, library: ServiceLibrary,
                    scale_max: int = DEFAULT_SCALE_MAX) -> ValidationReport:
    out: List[Finding] = []
    if not recipe.steps:
        out.append(Finding(recipe.id, "steps", "recipe has no steps"))
    if not recipe.budget >= 0:
        out.append(Finding(recipe.id, "budget", "budget must be nonnegative"))
    for dup in _duplicates(s.id for s in recipe.steps):
        out.append(Finding(dup, "id", f"duplicate recipe step id {dup!r}"))
    for step in recipe.steps:
        service = library.get(step.addresses)
        if service is None:
            out.append(Finding(step.id, "addresses", f"unresolved service {step.addresses!r}"))
            continue
        for dup in _duplicates(k for k, _ in step.property_values):
            out.append(Finding(step.id, "property_values", f"duplicate value for {dup!r}"))
        for name, value in step.property_values:
            prop = service.property(name)
            if prop is None:
                out.append(Finding(step.id, f"property_values.{name}",
                                   f"property not declared on service {service.id!r}"))
            elif not _value_matches_kind(value, prop):
                out.append(Finding(step.id, f"property_values.{name}",
                                   f"value {value!r} does not match {prop.kind} property"))
        declared = set(service.failure_mode_ids())
        for dup in _duplicates(fm.belongs_to for fm in step.failure_modes):
            out.append(Finding(step.id, "failure_modes",
                               f"more than one severity for {dup!r}"))
        for fm in step.failure_modes:
            if fm.belongs_to not in declared:
                out.append(Finding(step.id, "failure_modes",
                                   f"unresolved service failure mode {fm.belongs_to!r}"))
            if not _rating_ok(fm.severity, scale_max):
                out.append(Finding(step.id, "failure_modes",
                                   f"severity {fm.severity!r} outside [1, {scale_max}]"))
    return ValidationReport(tuple(out))


def validate_process(process: Process, catalog: EquipmentCatalog,
                     recipe: Recipe) -> ValidationReport:
    """Reference checks only; production semantics live in the matcher."""
    out: List[Finding] = []
    for dup in _duplicates(s.id for s in process.steps):
        out.append(Finding(dup, "id", f"duplicate process step id {dup!r}"))
    for step in process.steps:
        if catalog.service(step.uses) is None:
            out.append(Finding(step.id, "uses", f"unresolved equipment service {step.uses!r}"))
        if step.binds is not None and recipe.step(step.binds) is None:
            out.append(Finding(step.id, "binds", f"unresolved recipe step {step.binds!r}"))
    return ValidationReport(tuple(out))
