import copy
import random

import pytest
import yaml

from autopfmea import (ParseError, ProcessDoesNotProduce, ProducibilityError, analyze_process,
                       explore, parse_catalog, parse_library, parse_process, parse_recipe)
from autopfmea.datasets import roll_text
from autopfmea.model import (Equipment, EquipmentCatalog, EquipmentFailureMode,
                             EquipmentPropertyConstraint, EquipmentService, Recipe, RecipeStep,
                             RecipeStepFailureMode, Service, ServiceFailureMode, ServiceLibrary,
                             ServiceProperty, validate_catalog, validate_library,
                             validate_process, validate_recipe)

CONVEY = Service("convey", "Convey", (ServiceProperty("weight", "numeric", "kg"),),
                 (ServiceFailureMode("misplacement"), ServiceFailureMode("shock")))
GREASE = Service("grease", "Grease", (ServiceProperty("cold", "boolean"),),
                 (ServiceFailureMode("too_much_grease"),))
LIB = ServiceLibrary((CONVEY, GREASE))


def test_clean_library_has_no_findings():
    assert validate_library(LIB).findings == ()


def test_duplicate_service_id_is_named():
    report = validate_library(ServiceLibrary((CONVEY, CONVEY)))
    assert len(report) == 1
    assert report.findings[0].entity == "convey"


def test_empty_enumeration_is_one_finding():
    bad = Service("paint", "Paint", (ServiceProperty("colour", "enumeration", values=()),))
    report = validate_library(ServiceLibrary((bad,)))
    assert len(report) == 1
    assert report.findings[0].entity == "paint.colour"


def test_numeric_property_needs_unit():
    bad = Service("cut", "Cut", (ServiceProperty("length", "numeric", unit=" "),))
    assert not validate_library(ServiceLibrary((bad,))).ok


def _catalog(*services):
    return EquipmentCatalog(tuple(Equipment(f"eq{i}", "x", (es,)) for i, es in enumerate(services)))


def test_unresolved_service_reference():
    cat = _catalog(EquipmentService("x", fulfills="weld", cost=1.0))
    report = validate_catalog(cat, LIB)
    assert any("unresolved service" in f.message and "weld" in f.message for f in report)


def test_failure_mode_of_other_service():
    es = EquipmentService("belt", "convey", 1.0,
                          failure_modes=(EquipmentFailureMode("b1", "too_much_grease", 2),))
    report = validate_catalog(_catalog(es), LIB)
    assert len(report) == 1
    assert report.findings[0].field == "refers_to"


@pytest.mark.parametrize("constraint, fragment", [
    (EquipmentPropertyConstraint("height", max=3.0), "not declared"),
    (EquipmentPropertyConstraint("weight", allowed=("a",)), "enumSubset predicate"),
    (EquipmentPropertyConstraint("weight"), "at least one bound"),
    (EquipmentPropertyConstraint("weight", min=5.0, max=1.0), "exceeds"),
])
def test_constraint_findings(constraint, fragment):
    es = EquipmentService("belt", "convey", 1.0, constraints=(constraint,))
    report = validate_catalog(_catalog(es), LIB)
    assert any(fragment in f.message for f in report), report.findings


def test_occurrence_outside_scale():
    es = EquipmentService("belt", "convey", 1.0,
                          failure_modes=(EquipmentFailureMode("b1", "shock", 6),))
    assert validate_catalog(_catalog(es), LIB, scale_max=10).ok
    assert not validate_catalog(_catalog(es), LIB, scale_max=5).ok


def test_equipment_without_services():
    cat = EquipmentCatalog((Equipment("idle", "Idle machine", ()),))
    assert not validate_catalog(cat, LIB).ok


def test_roll_catalog_and_recipe_are_clean(roll):
    assert validate_library(roll.library).ok
    assert validate_catalog(roll.catalog, roll.library, roll.config.scale_max).ok
    assert validate_recipe(roll.recipe, roll.library, roll.config.scale_max).ok
    assert [s.id for s in roll.recipe.steps] == ["r1", "r2", "r3", "r4", "r5", "r6"]
    for p in (roll.process_p, roll.process_p_prime):
        assert validate_process(p, roll.catalog, roll.recipe).ok


def test_numeric_value_for_boolean_property():
    step = RecipeStep("g1", "grease", (("cold", 3),))
    report = validate_recipe(Recipe("r", (step,)), LIB)
    assert len(report) == 1
    assert "boolean" in report.findings[0].message


def test_two_severities_for_one_failure_mode():
    step = RecipeStep("c1", "convey", (), (RecipeStepFailureMode("shock", 2),
                                           RecipeStepFailureMode("shock", 4)))
    report = validate_recipe(Recipe("r", (step,)), LIB)
    assert any("more than one severity" in f.message for f in report)


def test_validation_is_idempotent(roll):
    broken = ServiceLibrary((CONVEY, CONVEY, GREASE))
    assert validate_library(broken) == validate_library(broken)
    assert str(validate_library(broken).findings) == str(validate_library(broken).findings)


def _mutate(node, rng, pool):
    """Replace one random scalar somewhere in a parsed YAML tree."""
    slots = []

    def walk(obj):
        items = obj.items() if isinstance(obj, dict) else enumerate(obj)
        for key, value in items:
            if isinstance(value, (dict, list)):
                walk(value)
            else:
                slots.append((obj, key))
    walk(node)
    parent, key = rng.choice(slots)
    parent[key] = rng.choice(pool)


def test_mutated_documents_fail_validation_or_analyze_cleanly(roll):
    """Random single-scalar corruptions either get caught up front or run
    through analysis without internal errors."""
    rng = random.Random(7)
    docs = {name: yaml.safe_load(roll_text(name))
            for name in ("library.yaml", "catalog.yaml", "recipe.yaml", "process_p.yaml")}
    pool = ["convey", "crimping", "robot_a_pick", "r2", "r9", "plastic", 0, 3, 7, 60, -1,
            2.5, True, "shock", "belt_shock", "grease"]
    outcomes = {"invalid": 0, "analyzed": 0}
    for _ in range(300):
        name = rng.choice(sorted(docs))
        mutated = copy.deepcopy(docs)
        _mutate(mutated[name], rng, pool)
        try:
            lib = parse_library(yaml.dump(mutated["library.yaml"], Dumper=yaml.CSafeDumper))
            cat = parse_catalog(yaml.dump(mutated["catalog.yaml"], Dumper=yaml.CSafeDumper))
            rec = parse_recipe(yaml.dump(mutated["recipe.yaml"], Dumper=yaml.CSafeDumper))
            proc = parse_process(yaml.dump(mutated["process_p.yaml"], Dumper=yaml.CSafeDumper))
        except ParseError:
            outcomes["invalid"] += 1
            continue
        report = validate_library(lib)
        if report.ok:
            report += validate_catalog(cat, lib, 5) + validate_recipe(rec, lib, 5)
        if report.ok:
            report += validate_process(proc, cat, rec)
        if not report.ok:
            outcomes["invalid"] += 1
            continue
        try:
            analyze_process(proc, rec, cat, roll.config)
        except ProcessDoesNotProduce:
            pass
        try:
            explore(rec, cat, roll.config)
        except ProducibilityError:
            pass
        outcomes["analyzed"] += 1
    assert outcomes["invalid"] > 0 and outcomes["analyzed"] > 0
