"""Analysis configuration: rating scale, thresholds, probability maps, ranking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

RANKING_CRITERIA = ("worst_rpn", "expected_cost", "duration")


class ConfigError(ValueError):
    pass


def default_occurrence_probability(scale_max: int) -> Dict[int, float]:
    # rating scale_max maps to 0.1, each step down is a factor of ten
    return {r: 10.0 ** (r - scale_max - 1) for r in range(1, scale_max + 1)}


def default_catch_probability(scale_max: int) -> Dict[int, float]:
    return {d: (scale_max - d) / (scale_max - 1) for d in range(1, scale_max + 1)}


@dataclass(frozen=True)
class AnalysisConfig:
    scale_max: int = 10
    risk_threshold: int = 40
    rpn_threshold: int = 200
    max_quality_measures: int = 3
    occurrence_probability: Optional[Dict[int, float]] = None
    catch_probability: Optional[Dict[int, float]] = None
    ranking_criteria: Tuple[str, ...] = RANKING_CRITERIA
    max_processes: int = 10000
    exhaustive_qm: bool = False

    def __post_init__(self):
        if not _is_int(self.scale_max) or self.scale_max < 2:
            raise ConfigError(f"scale_max must be an integer >= 2, got {self.scale_max!r}")
        if self.occurrence_probability is None:
            object.__setattr__(self, "occurrence_probability",
                               default_occurrence_probability(self.scale_max))
        if self.catch_probability is None:
            object.__setattr__(self, "catch_probability",
                               default_catch_probability(self.scale_max))
        object.__setattr__(self, "ranking_criteria", tuple(self.ranking_criteria))
        check_config(self)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def check_config(cfg: AnalysisConfig) -> None:
    """Raise ``ConfigError`` on the first violated invariant."""
    if not _is_int(cfg.scale_max) or cfg.scale_max < 2:
        raise ConfigError(f"scale_max must be an integer >= 2, got {cfg.scale_max!r}")
    for name in ("risk_threshold", "rpn_threshold", "max_processes"):
        value = getattr(cfg, name)
        if not _is_int(value) or value < 1:
            raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
    if not _is_int(cfg.max_quality_measures) or cfg.max_quality_measures < 0:
        raise ConfigError("max_quality_measures must be an integer >= 0, "
                          f"got {cfg.max_quality_measures!r}")
    if not isinstance(cfg.exhaustive_qm, bool):
        raise ConfigError("exhaustive_qm must be true or false")

    ratings = list(range(1, cfg.scale_max + 1))
    for name in ("occurrence_probability", "catch_probability"):
        mapping = getattr(cfg, name)
        if sorted(mapping) != ratings:
            raise ConfigError(f"{name} must map exactly the ratings 1..{cfg.scale_max}")

    occ = cfg.occurrence_probability
    for r in ratings:
        if not 0.0 < occ[r] < 1.0:
            raise ConfigError(f"occurrence_probability[{r}] = {occ[r]} not in (0, 1)")
    for lo, hi in zip(ratings, ratings[1:]):
        if not occ[lo] < occ[hi]:
            raise ConfigError(
                f"occurrence_probability must increase with rating: "
                f"rating {lo} -> {occ[lo]}, rating {hi} -> {occ[hi]}")

    catch = cfg.catch_probability
    for d in ratings:
        if not 0.0 <= catch[d] <= 1.0:
            raise ConfigError(f"catch_probability[{d}] = {catch[d]} not in [0, 1]")
    for lo, hi in zip(ratings, ratings[1:]):
        if catch[hi] > catch[lo]:
            raise ConfigError(
                f"catch_probability must not increase with rating: "
                f"rating {lo} -> {catch[lo]}, rating {hi} -> {catch[hi]}")
    if catch[cfg.scale_max] != 0:
        raise ConfigError(f"catch_probability[{cfg.scale_max}] must be 0 "
                          f"(undetectable), got {catch[cfg.scale_max]}")

    if not cfg.ranking_criteria:
        raise ConfigError("ranking_criteria must not be empty")
    unknown = [c for c in cfg.ranking_criteria if c not in RANKING_CRITERIA]
    if unknown:
        raise ConfigError(f"unknown ranking criteria {unknown}; choose from {RANKING_CRITERIA}")
    if len(set(cfg.ranking_criteria)) != len(cfg.ranking_criteria):
        raise ConfigError("ranking_criteria contains duplicates")
