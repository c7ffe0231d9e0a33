"""Automated process FMEA over abstract service libraries and equipment catalogs."""

from .catalog_io import (ParseError, parse_catalog, parse_config, parse_library, parse_process,
                         parse_recipe, write_document, write_report)
from .config import AnalysisConfig, ConfigError
from .economics import (DegenerateInputError, EconomicReport, catch_probability,
                        economic_report, occurrence_probability)
from .explorer import (Candidate, ExplorationResult, ProducibilityError, UnreachableQuality,
                       enumerate_base_processes, explore, improve_until_threshold,
                       rank_processes)
from .matcher import MatchResult, constraint_satisfied, process_produces, service_fulfills
from .model import (EquipmentCatalog, Process, ProcessStep, Recipe, ServiceLibrary,
                    ValidationReport, validate_catalog, validate_library, validate_process,
                    validate_recipe)
from .montecarlo import SimulationStats, compare_with_analytic, simulate
from .pfmea import (PfmeaWorksheet, ProcessDoesNotProduce, WorksheetRow, analyze_process,
                    compute_rpn, effective_detection)

__version__ = "0.1.0"
