import csv
import io
import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from autopfmea import (AnalysisConfig, ParseError, analyze_process, explore, parse_catalog,
                       parse_config, parse_library, parse_process, parse_recipe,
                       write_document, write_report)
from autopfmea.catalog_io import WORKSHEET_COLUMNS
from autopfmea.datasets import ROLL_FILES, roll_text
from autopfmea.matcher import constraint_satisfied
from autopfmea.pfmea import PfmeaWorksheet

from instances import random_instance

PARSERS = {"library.yaml": parse_library, "catalog.yaml": parse_catalog,
           "recipe.yaml": parse_recipe, "config.yaml": parse_config,
           "process_p.yaml": parse_process, "process_p_prime.yaml": parse_process}


def test_minimal_library():
    lib = parse_library("services:\n  - id: convey\n    name: Convey\n")
    assert [s.id for s in lib.services] == ["convey"]
    assert lib.services[0].properties == ()


def test_unknown_field_reports_path_and_line():
    doc = """\
id: r
steps:
  - id: s1
    addresses: convey
    failure_modes:
      - {belongs_to: shock, severty: 3}
"""
    with pytest.raises(ParseError) as err:
        parse_recipe(doc)
    assert err.value.path == "steps[0].failure_modes[0].severty"
    assert err.value.line == 6
    assert "severty" in str(err.value)


def test_syntax_error_has_line():
    with pytest.raises(ParseError) as err:
        parse_library("services:\n  - id: [unclosed\n  - id: x\n")
    assert err.value.line is not None
    assert "syntax error" in str(err.value)


def test_roll_library_has_four_services():
    lib = parse_library(roll_text("library.yaml"))
    assert [s.id for s in lib.services] == ["convey", "pick_and_place", "grease",
                                            "visual_inspect"]


def test_belt_conveyor_occurrences():
    cat = parse_catalog(roll_text("catalog.yaml"))
    belt = cat.equipment[0]
    assert belt.id == "belt_conveyor"
    assert [(f.refers_to, f.occurrence) for f in belt.services[0].failure_modes] == [
        ("misplacement", 2), ("shock", 1)]


def test_empty_catalog():
    assert parse_catalog("equipment: []\n").equipment == ()


def test_weight_limit_is_inclusive_upper_bound():
    cat = parse_catalog(roll_text("catalog.yaml"))
    weight = cat.service("robot_a_pick").constraints[0]
    assert (weight.property, weight.min, weight.max) == ("weight", None, 50)
    assert constraint_satisfied(weight, 50)
    assert not constraint_satisfied(weight, 50.01)


def test_constraint_with_two_predicates_is_rejected():
    doc = """\
equipment:
  - id: e
    services:
      - id: s
        fulfills: convey
        cost: 1
        constraints:
          - {property: weight, max: 3, allowed: [a]}
"""
    with pytest.raises(ParseError) as err:
        parse_catalog(doc)
    assert err.value.path == "equipment[0].services[0].constraints[0]"


def test_roll_recipe():
    recipe = parse_recipe(roll_text("recipe.yaml"))
    assert len(recipe.steps) == 6
    assert recipe.budget == 10


def test_recipe_without_steps():
    with pytest.raises(ParseError) as err:
        parse_recipe("id: r\nsteps: []\n")
    assert err.value.path == "steps"


def test_budget_defaults_to_unlimited():
    recipe = parse_recipe("id: r\nsteps:\n  - {id: a, addresses: convey}\n")
    assert math.isinf(recipe.budget)


def test_roll_config():
    cfg = parse_config(roll_text("config.yaml"))
    assert (cfg.scale_max, cfg.risk_threshold, cfg.rpn_threshold) == (5, 12, 50)


def test_non_monotone_occurrence_map():
    doc = ("scale_max: 5\noccurrence_probability: "
           "{1: 0.001, 2: 0.01, 3: 0.1, 4: 0.05, 5: 0.2}\n")
    with pytest.raises(ParseError) as err:
        parse_config(doc)
    msg = str(err.value)
    assert "rating 3" in msg and "rating 4" in msg
    assert err.value.path == "occurrence_probability"


def test_catch_probability_must_vanish_at_scale_max():
    doc = "scale_max: 5\ncatch_probability: {1: 1.0, 2: 0.8, 3: 0.5, 4: 0.3, 5: 0.2}\n"
    with pytest.raises(ParseError, match="must be 0"):
        parse_config(doc)


def test_empty_config_uses_defaults():
    assert parse_config("") == AnalysisConfig()


@pytest.mark.parametrize("bad", ["rank: 3\n", "ranking_criteria: []\n",
                                 "ranking_criteria: [worst_rpn, worst_rpn]\n",
                                 "scale_max: 1\n", "exhaustive_qm: 1\n"])
def test_bad_configs(bad):
    with pytest.raises(ParseError):
        parse_config(bad)


def test_empty_worksheet_csv_is_header_only():
    text = write_report(PfmeaWorksheet("P"), "csv")
    assert text == ",".join(WORKSHEET_COLUMNS) + "\n"


def test_worksheet_csv_conveyor_rows(roll):
    ws = analyze_process(roll.process_p, roll.recipe, roll.catalog, roll.config)
    rows = list(csv.DictReader(io.StringIO(write_report(ws, "csv"))))
    conveyor = {r["service_failure_mode"]: r for r in rows if r["recipe_step_id"] == "r1"}
    # 4*2*1 and 5*1*1
    assert conveyor["misplacement"]["rpn"] == "8"
    assert conveyor["shock"]["rpn"] == "5"
    assert conveyor["shock"]["covered_by"] == "p6a"


@pytest.mark.parametrize("fmt", ["table", "csv", "structured"])
def test_reports_are_deterministic(roll, fmt):
    ws = analyze_process(roll.process_p, roll.recipe, roll.catalog, roll.config)
    assert write_report(ws, fmt) == write_report(ws, fmt)
    result = explore(roll.recipe, roll.catalog, roll.config)
    assert write_report(result, fmt) == write_report(result, fmt)


def test_structured_exploration_report(roll):
    result = explore(roll.recipe, roll.catalog, roll.config)
    data = json.loads(write_report(result, "structured"))
    assert data["rejected_count"] == 1 and data["truncated"] is False
    top = data["ranked"][0]
    assert top["worksheet"]["worst_rpn"] == 50
    assert set(top["economics"]) == {"attempt_cost", "rejection_rate", "escape_rate",
                                     "expected_cost_per_accepted", "within_budget", "duration"}


@pytest.mark.parametrize("name", ROLL_FILES)
def test_fixture_round_trip(name):
    parse = PARSERS[name]
    once = parse(roll_text(name))
    assert parse(write_document(once)) == once


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_random_model_round_trip(seed):
    inst = random_instance(random.Random(seed), custom_probabilities=True)
    assert parse_library(write_document(inst.library)) == inst.library
    assert parse_catalog(write_document(inst.catalog)) == inst.catalog
    assert parse_recipe(write_document(inst.recipe)) == inst.recipe
    assert parse_config(write_document(inst.config)) == inst.config
