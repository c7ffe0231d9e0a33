import random
from dataclasses import replace

import pytest

from autopfmea import (ProducibilityError, UnreachableQuality, analyze_process,
                       enumerate_base_processes, explore, improve_until_threshold,
                       process_produces, rank_processes)
from autopfmea.explorer import Candidate, evaluate
from autopfmea.model import (CoveredFailureMode, Equipment, EquipmentCatalog, EquipmentService,
                             QualityMeasureSpec, Recipe, RecipeStep, validate_catalog)

from instances import random_instance


def _without(catalog, *service_ids):
    return EquipmentCatalog(tuple(
        replace(eq, services=tuple(s for s in eq.services if s.id not in service_ids))
        for eq in catalog.equipment))


def _with_crimp_scanner(catalog, detection=1):
    scanner = EquipmentService("crimp_scan", "visual_inspect", 0.5, quality_measure=(
        QualityMeasureSpec("inspection", (CoveredFailureMode("robot_a_crimping", detection),))))
    return EquipmentCatalog(catalog.equipment + (Equipment("crimp_scanner", "x", (scanner,)),))


def test_roll_has_two_base_processes(roll):
    bases = enumerate_base_processes(roll.recipe, roll.catalog)
    assert [b.steps[1].uses for b in bases] == ["robot_a_pick", "robot_b_pick"]
    for b in bases:
        assert process_produces(b, roll.recipe, roll.catalog).produces
        assert all(s.binds is not None for s in b.steps)


def test_unfulfilled_step_is_a_producibility_failure(roll):
    with pytest.raises(ProducibilityError) as err:
        enumerate_base_processes(roll.recipe, _without(roll.catalog, "robot_a_grease"))
    assert err.value.step_id == "r3"
    assert "r3" in str(err.value)


def test_cartesian_product_size():
    def option(i, service):
        return Equipment(f"e{i}", "e", (EquipmentService(f"es{i}", service, 1.0),))
    plan = {"a": 2, "b": 1, "c": 3}
    equipment, i = [], 0
    for service, count in plan.items():
        for _ in range(count):
            equipment.append(option(i, service))
            i += 1
    recipe = Recipe("r", tuple(RecipeStep(f"s{k}", svc) for k, svc in enumerate(plan)))
    bases = enumerate_base_processes(recipe, EquipmentCatalog(tuple(equipment)))
    assert len(bases) == 2 * 1 * 3
    assert len({b.id for b in bases}) == 6
    assert [b.id for b in bases] == sorted(b.id for b in bases)


def test_insertion_drops_worst_rpn_from_100_to_20(roll):
    catalog = _with_crimp_scanner(roll.catalog, detection=1)
    cand = evaluate(roll.process_p, roll.recipe, catalog, roll.config)
    assert cand.worksheet.worst_rpn == 100
    improved = improve_until_threshold(cand, roll.recipe, catalog, roll.config)
    assert isinstance(improved, Candidate)
    assert improved.worksheet.worst_rpn == 20
    # inserted right after the last binding step, before the existing camera
    assert [s.uses for s in improved.process.steps[-2:]] == ["crimp_scan", "camera_inspect"]
    assert improved.economics.attempt_cost == pytest.approx(cand.economics.attempt_cost + 0.5)


def test_laser_scanner_inserted_when_threshold_is_tight(roll):
    cfg = replace(roll.config, risk_threshold=8)
    base = enumerate_base_processes(roll.recipe, roll.catalog)[1]
    cand = evaluate(base, roll.recipe, roll.catalog, cfg)
    improved = improve_until_threshold(cand, roll.recipe, roll.catalog, cfg)
    crimp = [r for r in improved.worksheet.rows if r.service_failure_mode == "crimping"]
    assert [(r.rpn, r.detection) for r in crimp] == [(20, 2)]
    assert "laser_scan" in [s.uses for s in improved.process.steps]


def test_no_risky_rows_is_a_no_op(roll):
    cand = evaluate(roll.process_p_prime, roll.recipe, roll.catalog, roll.config)
    assert improve_until_threshold(cand, roll.recipe, roll.catalog, roll.config) is cand


def test_uncoverable_row_is_reported(roll):
    cand = evaluate(roll.process_p, roll.recipe, roll.catalog, roll.config)
    out = improve_until_threshold(cand, roll.recipe, roll.catalog, roll.config)
    assert isinstance(out, UnreachableQuality)
    assert [r.equipment_failure_mode for r in out.rows] == ["robot_a_crimping"]
    assert not out.budget_exhausted


def test_insertion_budget_exhaustion(roll):
    catalog = _with_crimp_scanner(roll.catalog)
    cfg = replace(roll.config, max_quality_measures=0)
    cand = evaluate(roll.process_p, roll.recipe, catalog, cfg)
    out = improve_until_threshold(cand, roll.recipe, catalog, cfg)
    assert isinstance(out, UnreachableQuality) and out.budget_exhausted


def test_rank_by_worst_rpn(roll):
    cfg = replace(roll.config, ranking_criteria=("worst_rpn",))
    p = evaluate(roll.process_p, roll.recipe, roll.catalog, cfg)
    p_prime = evaluate(roll.process_p_prime, roll.recipe, roll.catalog, cfg)
    assert [c.process.id for c in rank_processes([p, p_prime], cfg)] == ["P-prime", "P"]
    assert rank_processes([p], cfg) == [p]


def test_rank_ties_broken_by_cost(roll):
    cfg = replace(roll.config, ranking_criteria=("worst_rpn", "expected_cost"))
    base = evaluate(roll.process_p, roll.recipe, roll.catalog, cfg)
    dear = replace(base, process=replace(base.process, id="A"),
                   economics=replace(base.economics, expected_cost_per_accepted=11.0))
    cheap = replace(base, process=replace(base.process, id="B"),
                    economics=replace(base.economics, expected_cost_per_accepted=9.0))
    assert [c.process.id for c in rank_processes([dear, cheap], cfg)] == ["B", "A"]


def test_explore_roll_keeps_only_soft_gripper_family(roll):
    result = explore(roll.recipe, roll.catalog, roll.config)
    assert result.rejected_count == 1 and not result.truncated
    assert [c.process.steps[1].uses for c in result.ranked] == ["robot_b_pick"]
    assert result.ranked[0].worksheet.worst_rpn <= roll.config.rpn_threshold


def test_explore_roll_exhaustive(roll):
    cfg = replace(roll.config, exhaustive_qm=True)
    result = explore(roll.recipe, roll.catalog, cfg)
    assert result.ranked
    assert {c.process.steps[1].uses for c in result.ranked} == {"robot_b_pick"}
    top = result.ranked[0]
    assert top.worksheet.worst_rpn == 20
    assert [s.uses for s in top.process.steps if s.binds is None] == ["laser_scan"]


def test_truncation(roll):
    bigger = EquipmentCatalog(roll.catalog.equipment + tuple(
        Equipment(f"extra{i}", "x", (EquipmentService(f"extra_convey{i}", "convey", 0.1),))
        for i in range(2)))
    assert len(enumerate_base_processes(roll.recipe, bigger)) == 6
    result = explore(roll.recipe, bigger, replace(roll.config, max_processes=1))
    assert result.truncated
    assert len(result.ranked) + result.rejected_count == 1


def test_parallel_matches_serial():
    for seed in range(40):
        inst = random_instance(random.Random(seed), exhaustive=seed % 2 == 0)
        serial = explore(inst.recipe, inst.catalog, inst.config)
        parallel = explore(inst.recipe, inst.catalog, inst.config, workers=4)
        assert serial == parallel


def test_returned_candidates_meet_all_filters():
    for seed in range(150):
        inst = random_instance(random.Random(seed), exhaustive=False)
        cfg = inst.config
        for cand in explore(inst.recipe, inst.catalog, cfg).ranked:
            assert process_produces(cand.process, inst.recipe, inst.catalog).produces
            assert cand.worksheet.worst_rpn <= cfg.rpn_threshold
            assert cand.economics.within_budget
            assert cand.worksheet == analyze_process(cand.process, inst.recipe, inst.catalog, cfg)
            for row in cand.worksheet.rows:
                if row.risk > cfg.risk_threshold:
                    assert row.detection < cfg.scale_max


def _structures(result):
    return {c.process.id for c in result.ranked}


def test_enlarging_catalog_keeps_candidates_exhaustive():
    rng = random.Random(99)
    for seed in range(60):
        inst = random_instance(random.Random(seed), exhaustive=True)
        small = EquipmentCatalog(tuple(eq for eq in inst.catalog.equipment
                                       if eq.id.startswith("qeq") or rng.random() < 0.7))
        try:
            before = explore(inst.recipe, small, inst.config)
        except ProducibilityError:
            continue
        after = explore(inst.recipe, inst.catalog, inst.config)
        assert _structures(before) <= _structures(after)


def test_enlarging_catalog_with_production_equipment_keeps_candidates_greedy():
    for seed in range(60):
        inst = random_instance(random.Random(seed), exhaustive=False)
        extra = replace(inst.catalog.equipment[0], id="extra", services=tuple(
            replace(es, id=f"zz_{es.id}",
                    failure_modes=tuple(replace(fm, id=f"zz_{fm.id}") for fm in es.failure_modes))
            for es in inst.catalog.equipment[0].services))
        bigger = EquipmentCatalog(inst.catalog.equipment + (extra,))
        assert validate_catalog(bigger, inst.library, 5).ok
        assert _structures(explore(inst.recipe, inst.catalog, inst.config)) <= \
            _structures(explore(inst.recipe, bigger, inst.config))
