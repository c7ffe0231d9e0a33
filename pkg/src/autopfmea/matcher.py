"""Service fulfillment under property constraints, and process/recipe matching.

A process produces a recipe when its binding steps, read in process order,
are exactly the recipe steps in recipe order, each binding step's equipment
service fulfills its recipe step, and every other step is a quality measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .model import (EquipmentCatalog, EquipmentPropertyConstraint, EquipmentService,
                    Process, Recipe, RecipeStep)

ORDER_VIOLATION = "orderViolation"
UNBOUND_RECIPE_STEP = "unboundRecipeStep"
SERVICE_MISMATCH = "serviceMismatch"
CONSTRAINT_VIOLATION = "constraintViolation"
NON_QUALITY_EXTRA_STEP = "nonQualityExtraStep"


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass(frozen=True)
class MatchResult:
    produces: bool
    bindings: Tuple[Tuple[str, str], ...]  # (recipe step id, process step id)
    violations: Tuple[Violation, ...] = ()

    def kinds(self) -> List[str]:
        return [v.kind for v in self.violations]


def constraint_satisfied(constraint: EquipmentPropertyConstraint, value) -> bool:
    """Numeric bounds are inclusive at both ends."""
    kind = constraint.kind
    if kind == "numericRange":
        if constraint.min is not None and value < constraint.min:
            return False
        if constraint.max is not None and value > constraint.max:
            return False
        return True
    if kind == "enumSubset":
        return value in constraint.allowed
    return value == constraint.expected


def constraint_failures(es: EquipmentService, step: RecipeStep) -> List[str]:
    failures = []
    for c in es.constraints:
        if not step.has_value(c.property):
            failures.append(f"recipe step {step.id!r} gives no value for "
                            f"constrained property {c.property!r}")
        elif not constraint_satisfied(c, step.value(c.property)):
            failures.append(f"{es.id!r} cannot handle {c.property}="
                            f"{step.value(c.property)!r} in recipe step {step.id!r}")
    return failures


def service_fulfills(es: EquipmentService, step: RecipeStep) -> bool:
    if es.fulfills != step.addresses:
        return False
    return not constraint_failures(es, step)


def process_produces(process: Process, recipe: Recipe,
                     catalog: EquipmentCatalog) -> MatchResult:
    """Check every production condition and report all violations found."""
    violations: List[Violation] = []
    bindings: List[Tuple[str, str]] = []
    recipe_index = {step.id: i for i, step in enumerate(recipe.steps)}

    bound_order: List[int] = []
    seen = set()
    for pstep in process.steps:
        es = catalog.service(pstep.uses)
        if pstep.binds is None:
            if es is None or not es.is_quality_measure:
                violations.append(Violation(
                    NON_QUALITY_EXTRA_STEP,
                    f"process step {pstep.id!r} binds no recipe step and "
                    f"{pstep.uses!r} is not a quality measure"))
            continue

        if pstep.binds not in recipe_index:
            violations.append(Violation(
                ORDER_VIOLATION,
                f"process step {pstep.id!r} binds unknown recipe step {pstep.binds!r}"))
            continue
        if pstep.binds in seen:
            violations.append(Violation(
                ORDER_VIOLATION,
                f"recipe step {pstep.binds!r} bound again by process step {pstep.id!r}"))
            continue
        seen.add(pstep.binds)
        bound_order.append(recipe_index[pstep.binds])

        rstep = recipe.steps[recipe_index[pstep.binds]]
        ok = True
        if es is None:
            violations.append(Violation(
                SERVICE_MISMATCH,
                f"process step {pstep.id!r} uses unknown equipment service {pstep.uses!r}"))
            ok = False
        elif es.fulfills != rstep.addresses:
            violations.append(Violation(
                SERVICE_MISMATCH,
                f"{es.id!r} fulfills {es.fulfills!r} but recipe step {rstep.id!r} "
                f"addresses {rstep.addresses!r}"))
            ok = False
        else:
            for msg in constraint_failures(es, rstep):
                violations.append(Violation(CONSTRAINT_VIOLATION, msg))
                ok = False
        if ok:
            bindings.append((rstep.id, pstep.id))

    for a, b in zip(bound_order, bound_order[1:]):
        if a > b:
            violations.append(Violation(
                ORDER_VIOLATION,
                f"recipe step {recipe.steps[b].id!r} is bound after "
                f"{recipe.steps[a].id!r}, against recipe order"))

    for step in recipe.steps:
        if step.id not in seen:
            violations.append(Violation(
                UNBOUND_RECIPE_STEP, f"recipe step {step.id!r} is not bound by any process step"))

    return MatchResult(not violations, tuple(bindings), tuple(violations))
