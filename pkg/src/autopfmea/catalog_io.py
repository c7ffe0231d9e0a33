"""YAML documents for libraries, catalogs, recipes, processes and configs,
plus report rendering (aligned table, CSV, JSON).

Parsing is strict: unknown fields are errors.  Every ``ParseError`` carries
the dotted field path and, where the YAML composer knows it, the source
line.  Parsing checks structure only; cross references are checked by the
``validate_*`` functions in :mod:`autopfmea.model`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import fields as dc_fields
from typing import Any, Dict, List, Optional

import yaml

try:
    _Loader = yaml.CSafeLoader
except AttributeError:  # PyYAML built without libyaml
    _Loader = yaml.SafeLoader
_Dumper = getattr(yaml, "CSafeDumper", yaml.SafeDumper)

from .config import AnalysisConfig, ConfigError
from .explorer import ExplorationResult
from .matcher import MatchResult
from .model import (CoveredFailureMode, Equipment, EquipmentCatalog, EquipmentFailureMode,
                    EquipmentPropertyConstraint, EquipmentService, Process, ProcessStep,
                    QualityMeasureSpec, Recipe, RecipeStep, RecipeStepFailureMode, Service,
                    ServiceFailureMode, ServiceLibrary, ServiceProperty, ValidationReport)
from .pfmea import PfmeaWorksheet

WORKSHEET_COLUMNS = ("process_id", "process_step_id", "recipe_step_id", "service_failure_mode",
                     "severity", "occurrence", "detection", "rpn", "covered_by")
CANDIDATE_COLUMNS = ("rank", "process_id", "worst_rpn", "worst_risk", "attempt_cost",
                     "rejection_rate", "escape_rate", "expected_cost_per_accepted",
                     "within_budget", "duration")
FORMATS = ("table", "csv", "structured")


class ParseError(ValueError):
    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.message = message
        self.path = path or "<document>"
        self.line = line
        where = self.path if line is None else f"line {line}: {self.path}"
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------------------
# low-level reading
# ---------------------------------------------------------------------------


def _node_lines(node, path: str, out: Dict[str, int]) -> None:
    out.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            child = f"{path}.{key.value}" if path else str(key.value)
            out.setdefault(child, key.start_mark.line + 1)
            _node_lines(value, child, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            _node_lines(item, f"{path}[{i}]", out)


class _Reader:
    def __init__(self, text: str):
        loader = _Loader(text)
        try:
            node = loader.get_single_node()
            self.data = None if node is None else loader.construct_document(node)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            problem = getattr(exc, "problem", None) or str(exc)
            raise ParseError(f"syntax error: {problem}", "", line) from None
        finally:
            loader.dispose()
        self.lines: Dict[str, int] = {}
        if node is not None:
            _node_lines(node, "", self.lines)

    def error(self, message: str, path: str):
        line = self.lines.get(path)
        if line is None:
            # fall back to the nearest enclosing element that has a position
            parent = path
            while parent and line is None:
                parent = parent.rsplit(".", 1)[0] if "." in parent else ""
                line = self.lines.get(parent)
        return ParseError(message, path, line)

    def mapping(self, obj, path: str, required=(), optional=()) -> Dict[str, Any]:
        if not isinstance(obj, dict):
            raise self.error(f"expected a mapping, got {type(obj).__name__}", path)
        for key in obj:
            if key not in required and key not in optional:
                raise self.error(f"unknown field {key!r}", _join(path, key))
        for key in required:
            if key not in obj:
                raise self.error(f"missing required field {key!r}", _join(path, key))
        return obj

    def seq(self, obj, path: str) -> list:
        if obj is None:
            return []
        if not isinstance(obj, list):
            raise self.error(f"expected a list, got {type(obj).__name__}", path)
        return obj

    def text(self, obj, path: str) -> str:
        if isinstance(obj, bool) or not isinstance(obj, (str, int, float)):
            raise self.error(f"expected text, got {type(obj).__name__}", path)
        return str(obj)

    def number(self, obj, path: str) -> float:
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            raise self.error(f"expected a number, got {obj!r}", path)
        return obj

    def integer(self, obj, path: str) -> int:
        if isinstance(obj, bool) or not isinstance(obj, int):
            raise self.error(f"expected an integer, got {obj!r}", path)
        return obj

    def boolean(self, obj, path: str) -> bool:
        if not isinstance(obj, bool):
            raise self.error(f"expected true or false, got {obj!r}", path)
        return obj


def _join(path: str, key) -> str:
    return f"{path}.{key}" if path else str(key)


def _root(reader: _Reader, required=(), optional=()) -> Dict[str, Any]:
    if reader.data is None:
        raise ParseError("empty document")
    return reader.mapping(reader.data, "", required, optional)


# ---------------------------------------------------------------------------
# parsers
# ---------------------------------------------------------------------------


def parse_library(document: str) -> ServiceLibrary:
    r = _Reader(document)
    root = _root(r, required=("services",))
    services = []
    for i, raw in enumerate(r.seq(root["services"], "services")):
        path = f"services[{i}]"
        d = r.mapping(raw, path, ("id",), ("name", "properties", "failure_modes"))
        sid = r.text(d["id"], f"{path}.id")
        props = []
        for j, praw in enumerate(r.seq(d.get("properties"), f"{path}.properties")):
            ppath = f"{path}.properties[{j}]"
            p = r.mapping(praw, ppath, ("name", "kind"), ("unit", "values"))
            kind = r.text(p["kind"], f"{ppath}.kind")
            allowed = {"numeric": ("unit",), "enumeration": ("values",), "boolean": ()}.get(kind)
            if allowed is None:
                raise r.error(f"unknown property kind {kind!r}", f"{ppath}.kind")
            for extra in ("unit", "values"):
                if extra in p and extra not in allowed:
                    raise r.error(f"field {extra!r} not allowed for {kind} property",
                                  f"{ppath}.{extra}")
            values = tuple(r.text(v, f"{ppath}.values[{k}]")
                           for k, v in enumerate(r.seq(p.get("values"), f"{ppath}.values")))
            unit = r.text(p["unit"], f"{ppath}.unit") if "unit" in p else None
            props.append(ServiceProperty(r.text(p["name"], f"{ppath}.name"), kind, unit, values))
        fms = []
        for j, fraw in enumerate(r.seq(d.get("failure_modes"), f"{path}.failure_modes")):
            fpath = f"{path}.failure_modes[{j}]"
            f = r.mapping(fraw, fpath, ("id",), ("description",))
            fms.append(ServiceFailureMode(r.text(f["id"], f"{fpath}.id"),
                                          r.text(f.get("description", ""), f"{fpath}.description")))
        name = r.text(d.get("name", sid), f"{path}.name")
        services.append(Service(sid, name, tuple(props), tuple(fms)))
    return ServiceLibrary(tuple(services))


def _parse_constraint(r: _Reader, raw, path: str) -> EquipmentPropertyConstraint:
    c = r.mapping(raw, path, ("property",), ("min", "max", "allowed", "expected"))
    groups = [g for g, keys in (("range", ("min", "max")), ("allowed", ("allowed",)),
                                 ("expected", ("expected",))) if any(k in c for k in keys)]
    if len(groups) != 1:
        raise r.error("constraint needs exactly one of min/max, allowed or expected", path)
    prop = r.text(c["property"], f"{path}.property")
    if groups[0] == "range":
        lo = r.number(c["min"], f"{path}.min") if "min" in c else None
        hi = r.number(c["max"], f"{path}.max") if "max" in c else None
        return EquipmentPropertyConstraint(prop, min=lo, max=hi)
    if groups[0] == "allowed":
        allowed = tuple(r.text(v, f"{path}.allowed[{k}]")
                        for k, v in enumerate(r.seq(c["allowed"], f"{path}.allowed")))
        return EquipmentPropertyConstraint(prop, allowed=allowed)
    return EquipmentPropertyConstraint(prop, expected=r.boolean(c["expected"], f"{path}.expected"))


def parse_catalog(document: str) -> EquipmentCatalog:
    r = _Reader(document)
    root = _root(r, required=("equipment",))
    equipment = []
    for i, raw in enumerate(r.seq(root["equipment"], "equipment")):
        path = f"equipment[{i}]"
        d = r.mapping(raw, path, ("id", "services"), ("name",))
        eid = r.text(d["id"], f"{path}.id")
        services = []
        for j, sraw in enumerate(r.seq(d["services"], f"{path}.services")):
            spath = f"{path}.services[{j}]"
            s = r.mapping(sraw, spath, ("id", "fulfills", "cost"),
                          ("duration", "constraints", "failure_modes", "quality_measure"))
            constraints = tuple(
                _parse_constraint(r, c, f"{spath}.constraints[{k}]")
                for k, c in enumerate(r.seq(s.get("constraints"), f"{spath}.constraints")))
            fms = []
            for k, fraw in enumerate(r.seq(s.get("failure_modes"), f"{spath}.failure_modes")):
                fpath = f"{spath}.failure_modes[{k}]"
                f = r.mapping(fraw, fpath, ("id", "refers_to", "occurrence"))
                fms.append(EquipmentFailureMode(r.text(f["id"], f"{fpath}.id"),
                                                r.text(f["refers_to"], f"{fpath}.refers_to"),
                                                r.integer(f["occurrence"], f"{fpath}.occurrence")))
            qm = None
            if s.get("quality_measure") is not None:
                qpath = f"{spath}.quality_measure"
                q = r.mapping(s["quality_measure"], qpath, ("kind", "covers"))
                covers = []
                for k, craw in enumerate(r.seq(q["covers"], f"{qpath}.covers")):
                    cpath = f"{qpath}.covers[{k}]"
                    c = r.mapping(craw, cpath, ("equipment_failure_mode", "detection"))
                    covers.append(CoveredFailureMode(
                        r.text(c["equipment_failure_mode"], f"{cpath}.equipment_failure_mode"),
                        r.integer(c["detection"], f"{cpath}.detection")))
                qm = QualityMeasureSpec(r.text(q["kind"], f"{qpath}.kind"), tuple(covers))
            duration = s.get("duration")
            services.append(EquipmentService(
                id=r.text(s["id"], f"{spath}.id"),
                fulfills=r.text(s["fulfills"], f"{spath}.fulfills"),
                cost=r.number(s["cost"], f"{spath}.cost"),
                duration=None if duration is None else r.number(duration, f"{spath}.duration"),
                constraints=constraints,
                failure_modes=tuple(fms),
                quality_measure=qm,
            ))
        equipment.append(Equipment(eid, r.text(d.get("name", eid), f"{path}.name"),
                                   tuple(services)))
    return EquipmentCatalog(tuple(equipment))


def parse_recipe(document: str) -> Recipe:
    r = _Reader(document)
    root = _root(r, required=("id", "steps"), optional=("budget",))
    raw_steps = r.seq(root["steps"], "steps")
    if not raw_steps:
        raise r.error("recipe needs at least one step", "steps")
    steps = []
    for i, raw in enumerate(raw_steps):
        path = f"steps[{i}]"
        d = r.mapping(raw, path, ("id", "addresses"), ("property_values", "failure_modes"))
        values = []
        pv = d.get("property_values") or {}
        if not isinstance(pv, dict):
            raise r.error("expected a mapping of property values", f"{path}.property_values")
        for name, value in pv.items():
            vpath = f"{path}.property_values.{name}"
            if not isinstance(value, (bool, int, float, str)):
                raise r.error(f"unsupported property value {value!r}", vpath)
            values.append((str(name), value))
        fms = []
        for j, fraw in enumerate(r.seq(d.get("failure_modes"), f"{path}.failure_modes")):
            fpath = f"{path}.failure_modes[{j}]"
            f = r.mapping(fraw, fpath, ("belongs_to", "severity"))
            fms.append(RecipeStepFailureMode(r.text(f["belongs_to"], f"{fpath}.belongs_to"),
                                             r.integer(f["severity"], f"{fpath}.severity")))
        steps.append(RecipeStep(r.text(d["id"], f"{path}.id"),
                                r.text(d["addresses"], f"{path}.addresses"),
                                tuple(values), tuple(fms)))
    budget = root.get("budget")
    budget = math.inf if budget is None else r.number(budget, "budget")
    return Recipe(r.text(root["id"], "id"), tuple(steps), budget)


def parse_process(document: str) -> Process:
    r = _Reader(document)
    root = _root(r, required=("id", "steps"))
    steps = []
    for i, raw in enumerate(r.seq(root["steps"], "steps")):
        path = f"steps[{i}]"
        d = r.mapping(raw, path, ("id", "uses"), ("binds",))
        binds = d.get("binds")
        steps.append(ProcessStep(r.text(d["id"], f"{path}.id"), r.text(d["uses"], f"{path}.uses"),
                                 None if binds is None else r.text(binds, f"{path}.binds")))
    return Process(r.text(root["id"], "id"), tuple(steps))


_CONFIG_FIELDS = tuple(f.name for f in dc_fields(AnalysisConfig))


def parse_config(document: str) -> AnalysisConfig:
    r = _Reader(document)
    if r.data is None:
        return AnalysisConfig()
    root = r.mapping(r.data, "", (), _CONFIG_FIELDS)
    kwargs: Dict[str, Any] = {}
    for name in ("scale_max", "risk_threshold", "rpn_threshold", "max_quality_measures",
                 "max_processes"):
        if name in root:
            kwargs[name] = r.integer(root[name], name)
    if "exhaustive_qm" in root:
        kwargs["exhaustive_qm"] = r.boolean(root["exhaustive_qm"], "exhaustive_qm")
    for name in ("occurrence_probability", "catch_probability"):
        if name in root:
            m = root[name]
            if not isinstance(m, dict):
                raise r.error("expected a mapping from rating to probability", name)
            kwargs[name] = {r.integer(k, f"{name}.{k}"): float(r.number(v, f"{name}.{k}"))
                            for k, v in m.items()}
    if "ranking_criteria" in root:
        kwargs["ranking_criteria"] = tuple(
            r.text(c, f"ranking_criteria[{i}]")
            for i, c in enumerate(r.seq(root["ranking_criteria"], "ranking_criteria")))
    try:
        return AnalysisConfig(**kwargs)
    except ConfigError as exc:
        path = next((n for n in _CONFIG_FIELDS if str(exc).startswith(n)), "")
        raise r.error(str(exc), path) from None


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def _library_dict(lib: ServiceLibrary) -> dict:
    services = []
    for s in lib.services:
        props = []
        for p in s.properties:
            d: Dict[str, Any] = {"name": p.name, "kind": p.kind}
            if p.unit is not None:
                d["unit"] = p.unit
            if p.kind == "enumeration":
                d["values"] = list(p.values)
            props.append(d)
        services.append({"id": s.id, "name": s.name, "properties": props,
                         "failure_modes": [{"id": f.id, "description": f.description}
                                           for f in s.failure_modes]})
    return {"services": services}


def _constraint_dict(c: EquipmentPropertyConstraint) -> dict:
    d: Dict[str, Any] = {"property": c.property}
    if c.kind == "numericRange":
        if c.min is not None:
            d["min"] = c.min
        if c.max is not None:
            d["max"] = c.max
    elif c.kind == "enumSubset":
        d["allowed"] = list(c.allowed)
    else:
        d["expected"] = c.expected
    return d


def _catalog_dict(cat: EquipmentCatalog) -> dict:
    equipment = []
    for eq in cat.equipment:
        services = []
        for es in eq.services:
            d: Dict[str, Any] = {"id": es.id, "fulfills": es.fulfills, "cost": es.cost}
            if es.duration is not None:
                d["duration"] = es.duration
            d["constraints"] = [_constraint_dict(c) for c in es.constraints]
            d["failure_modes"] = [{"id": f.id, "refers_to": f.refers_to,
                                   "occurrence": f.occurrence} for f in es.failure_modes]
            if es.quality_measure is not None:
                d["quality_measure"] = {
                    "kind": es.quality_measure.kind,
                    "covers": [{"equipment_failure_mode": c.equipment_failure_mode,
                                "detection": c.detection} for c in es.quality_measure.covers]}
            services.append(d)
        equipment.append({"id": eq.id, "name": eq.name, "services": services})
    return {"equipment": equipment}


def _recipe_dict(recipe: Recipe) -> dict:
    d: Dict[str, Any] = {"id": recipe.id}
    if not math.isinf(recipe.budget):
        d["budget"] = recipe.budget
    d["steps"] = [{"id": s.id, "addresses": s.addresses,
                   "property_values": dict(s.property_values),
                   "failure_modes": [{"belongs_to": f.belongs_to, "severity": f.severity}
                                     for f in s.failure_modes]}
                  for s in recipe.steps]
    return d


def _process_dict(process: Process) -> dict:
    steps = []
    for s in process.steps:
        d = {"id": s.id, "uses": s.uses}
        if s.binds is not None:
            d["binds"] = s.binds
        steps.append(d)
    return {"id": process.id, "steps": steps}


def _config_dict(cfg: AnalysisConfig) -> dict:
    return {
        "scale_max": cfg.scale_max,
        "risk_threshold": cfg.risk_threshold,
        "rpn_threshold": cfg.rpn_threshold,
        "max_quality_measures": cfg.max_quality_measures,
        "occurrence_probability": dict(sorted(cfg.occurrence_probability.items())),
        "catch_probability": dict(sorted(cfg.catch_probability.items())),
        "ranking_criteria": list(cfg.ranking_criteria),
        "max_processes": cfg.max_processes,
        "exhaustive_qm": cfg.exhaustive_qm,
    }


_DOCUMENT_WRITERS = {
    ServiceLibrary: _library_dict,
    EquipmentCatalog: _catalog_dict,
    Recipe: _recipe_dict,
    Process: _process_dict,
    AnalysisConfig: _config_dict,
}


def write_document(obj) -> str:
    """Serialize a model object back to its YAML document form."""
    try:
        to_dict = _DOCUMENT_WRITERS[type(obj)]
    except KeyError:
        raise TypeError(f"no document form for {type(obj).__name__}") from None
    return yaml.dump(to_dict(obj), Dumper=_Dumper, sort_keys=False, allow_unicode=True)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _worksheet_rows(ws) -> List[list]:
    return [[r.process_id, r.process_step_id, r.recipe_step_id, r.service_failure_mode,
             r.severity, r.occurrence, r.detection, r.rpn, r.covered_by or ""]
            for r in ws.rows]


def _economics_dict(e) -> dict:
    return {"attempt_cost": e.attempt_cost, "rejection_rate": e.rejection_rate,
            "escape_rate": e.escape_rate,
            "expected_cost_per_accepted": e.expected_cost_per_accepted,
            "within_budget": e.within_budget, "duration": e.duration}


def _worksheet_dict(ws) -> dict:
    return {"process_id": ws.process_id, "worst_rpn": ws.worst_rpn, "worst_risk": ws.worst_risk,
            "rows": [dict(zip(WORKSHEET_COLUMNS, row)) | {"covered_by": r.covered_by,
                                                          "equipment_failure_mode":
                                                              r.equipment_failure_mode}
                     for row, r in zip(_worksheet_rows(ws), ws.rows)]}


def _candidate_row(rank: int, c) -> list:
    e = c.economics
    return [rank, c.process.id, c.worksheet.worst_rpn, c.worksheet.worst_risk, e.attempt_cost,
            e.rejection_rate, e.escape_rate, e.expected_cost_per_accepted,
            e.within_budget, "" if e.duration is None else e.duration]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _table(header, rows) -> str:
    cells = [list(header)] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _render_worksheet(ws, fmt: str) -> str:
    rows = _worksheet_rows(ws)
    if fmt == "csv":
        return _csv(WORKSHEET_COLUMNS, rows)
    if fmt == "structured":
        return _json(_worksheet_dict(ws))
    return (f"PFMEA worksheet for {ws.process_id}\n" + _table(WORKSHEET_COLUMNS, rows)
            + f"worst RPN: {ws.worst_rpn}   worst risk (sev x occ): {ws.worst_risk}\n")


def _render_exploration(result, fmt: str) -> str:
    rows = [_candidate_row(i, c) for i, c in enumerate(result.ranked, start=1)]
    if fmt == "csv":
        return _csv(CANDIDATE_COLUMNS, rows)
    if fmt == "structured":
        return _json({
            "rejected_count": result.rejected_count,
            "truncated": result.truncated,
            "ranked": [{"rank": i, "process": _process_dict(c.process),
                        "worksheet": _worksheet_dict(c.worksheet),
                        "economics": _economics_dict(c.economics)}
                       for i, c in enumerate(result.ranked, start=1)],
        })
    return (_table(CANDIDATE_COLUMNS, rows)
            + f"{len(result.ranked)} candidate(s), {result.rejected_count} rejected"
            + (", enumeration truncated" if result.truncated else "") + "\n")


def _render_validation(report: ValidationReport, fmt: str) -> str:
    rows = [[f.entity, f.field, f.message] for f in report.findings]
    header = ("entity", "field", "message")
    if fmt == "csv":
        return _csv(header, rows)
    if fmt == "structured":
        return _json({"findings": [dict(zip(header, r)) for r in rows]})
    if not rows:
        return "no findings\n"
    return _table(header, rows)


def _render_match(match, fmt: str) -> str:
    if fmt == "structured":
        return _json({"produces": match.produces,
                      "bindings": [list(b) for b in match.bindings],
                      "violations": [{"kind": v.kind, "detail": v.detail}
                                     for v in match.violations]})
    header = ("kind", "detail")
    rows = [[v.kind, v.detail] for v in match.violations]
    if fmt == "csv":
        return _csv(header, rows)
    head = "process produces recipe\n" if match.produces else "process does NOT produce recipe\n"
    return head + (_table(header, rows) if rows else "")


def _render_simulation(pair, fmt: str) -> str:
    stats, comparison = pair
    header = ("rate", "analytic", "empirical", "sigma", "flagged")
    rows = [[c.name, c.analytic, c.empirical, c.sigma, c.flagged] for c in comparison.checks]
    if fmt == "csv":
        return _csv(header, rows)
    stats_d = {"items": stats.items, "rejected": stats.rejected, "escaped": stats.escaped,
               "undetected": stats.undetected, "total_cost": stats.total_cost,
               "seed": stats.seed}
    if fmt == "structured":
        return _json({"stats": stats_d, "comparison": [dict(zip(header, r)) for r in rows]})
    head = "  ".join(f"{k}={_fmt(v)}" for k, v in stats_d.items()) + "\n"
    return head + _table(header, rows)


def write_report(result, fmt: str = "table") -> str:
    """Render an analysis result as deterministic text.

    Accepts a worksheet, an exploration result, a validation report, a
    match result, or a ``(SimulationStats, ComparisonReport)`` pair.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    if isinstance(result, PfmeaWorksheet):
        return _render_worksheet(result, fmt)
    if isinstance(result, ExplorationResult):
        return _render_exploration(result, fmt)
    if isinstance(result, ValidationReport):
        return _render_validation(result, fmt)
    if isinstance(result, MatchResult):
        return _render_match(result, fmt)
    if isinstance(result, tuple) and len(result) == 2:
        return _render_simulation(result, fmt)
    raise TypeError(f"cannot render {type(result).__name__}")
