"""Bundled example documents."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .catalog_io import parse_catalog, parse_config, parse_library, parse_process, parse_recipe
from .config import AnalysisConfig
from .model import EquipmentCatalog, Process, Recipe, ServiceLibrary

ROLL_FILES = ("library.yaml", "catalog.yaml", "recipe.yaml", "config.yaml",
              "process_p.yaml", "process_p_prime.yaml")


@dataclass(frozen=True)
class RollExample:
    library: ServiceLibrary
    catalog: EquipmentCatalog
    recipe: Recipe
    config: AnalysisConfig
    process_p: Process
    process_p_prime: Process


def roll_path(name: str):
    """Filesystem path of one bundled roll-example document."""
    return resources.files("autopfmea") / "data" / "roll" / name


def roll_text(name: str) -> str:
    return roll_path(name).read_text(encoding="utf-8")


def load_roll_example() -> RollExample:
    """The roll assembly case: a six-step recipe with two candidate processes,
    P (standard robot arm, camera inspection) and P' (soft-gripper robot arm,
    laser scanner)."""
    return RollExample(
        library=parse_library(roll_text("library.yaml")),
        catalog=parse_catalog(roll_text("catalog.yaml")),
        recipe=parse_recipe(roll_text("recipe.yaml")),
        config=parse_config(roll_text("config.yaml")),
        process_p=parse_process(roll_text("process_p.yaml")),
        process_p_prime=parse_process(roll_text("process_p_prime.yaml")),
    )
