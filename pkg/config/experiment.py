#########################################################################################
# Experiment configuration: one validated object per CLI run, built from an optional
# JSON/YAML file with command-line overrides applied on top.
#########################################################################################
import json
import math
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.model import NetworkTopology, Scheme
from infra.error_handler import ConfigError, ModelError

from .settings import get_settings

logger = logging.getLogger(__name__)


class ExperimentKind(str, Enum):
    OUTAGE_SWEEP = "outage-sweep"
    CAPACITY_SWEEP = "capacity-sweep"
    VALIDATE_LEMMA1 = "validate-lemma1"
    COMPARE_SCHEMES = "compare-schemes"


def _strictly_increasing(name: str, values: List[Any]) -> None:
    if not values:
        raise ConfigError(name, "must not be empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(name, f"must be strictly increasing, got {values}")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ExperimentKind
    relays: List[int] = Field(default_factory=lambda: [2])
    symbols: List[int] = Field(default_factory=lambda: [2])
    rate: float = Field(default=1.0, gt=0.0)
    snr_db: List[float] = Field(default_factory=lambda: [25.0])
    schemes: List[Scheme] = Field(default_factory=lambda: list(Scheme))
    n_trials: int = Field(default=100_000, ge=1)
    seed: int = Field(default_factory=lambda: get_settings().default_seed, ge=0)
    variances: Optional[Dict[str, float]] = None
    variance_range: Tuple[float, float] = (0.1, 25.0)
    n0: float = Field(default=1.0, gt=0.0)
    bandwidth: float = Field(default=1.0, gt=0.0)
    n_channels: int = Field(default=100, ge=10)
    n_noise: int = Field(default=10_000, ge=1000)
    workers: int = Field(default_factory=lambda: get_settings().workers, ge=1)
    out: Path = Field(default_factory=lambda: Path(get_settings().results_dir) / "experiment.csv")

    @field_validator("schemes", mode="before")
    @classmethod
    def _parse_schemes(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [value]
        return [Scheme.parse(v) if isinstance(v, str) else v for v in value]

    @model_validator(mode="after")
    def _check_grids(self) -> "ExperimentConfig":
        _strictly_increasing("relays", self.relays)
        _strictly_increasing("symbols", self.symbols)
        _strictly_increasing("snr_db", self.snr_db)
        if any(k < 0 for k in self.relays):
            raise ConfigError("relays", f"relay counts must be >= 0, got {self.relays}")
        if any(m < 1 for m in self.symbols):
            raise ConfigError("symbols", f"symbol counts must be >= 1, got {self.symbols}")
        if not self.schemes:
            raise ConfigError("schemes", "must name at least one scheme")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("schemes", "must not repeat a scheme")
        lo, hi = self.variance_range
        if not (0.0 < lo <= hi and math.isfinite(hi)):
            raise ConfigError("variance_range", f"must satisfy 0 < lo <= hi < inf, got ({lo}, {hi})")
        if self.variances is not None:
            if len(self.relays) != 1:
                raise ConfigError("variances", "an explicit variance table needs exactly one relay count")
            try:
                NetworkTopology(n_relays=self.relays[0], n_symbols=self.symbols[0], variances=self.variances)
            except (ValueError, ModelError) as e:
                raise ConfigError("variances", str(e)) from None
        if self.kind is ExperimentKind.COMPARE_SCHEMES and Scheme.STNC_OHAF not in self.schemes:
            raise ConfigError("schemes", "compare-schemes needs STNC-OHAF in the scheme list")
        return self

    def resolved(self) -> Dict[str, Any]:
        return json.loads(self.model_dump_json())


#########################################################################################
# Read a JSON or YAML config file; a "scenario" entry pulls K, M, variances, N0 and R
# from a scenario document without overriding keys given explicitly.
#########################################################################################
def _read_file(path: Path) -> Dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e}") from None
    try:
        data = yaml.safe_load(text) if path.suffix.lower() in {".yaml", ".yml"} else json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError("config", f"cannot parse {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a mapping at the top level")
    return data


def _apply_scenario(data: Dict[str, Any], base: Path) -> Dict[str, Any]:
    from infra.results import ScenarioLoader

    scenario_path = Path(data.pop("scenario"))
    if not scenario_path.is_absolute():
        scenario_path = base / scenario_path
    try:
        scenario = ScenarioLoader().load(scenario_path)
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError("scenario", f"cannot load {scenario_path}: {e}") from None
    data.setdefault("relays", [scenario.topology.n_relays])
    data.setdefault("symbols", [scenario.topology.n_symbols])
    data.setdefault("variances", dict(scenario.topology.variances))
    data.setdefault("n0", scenario.n0)
    if scenario.rate is not None:
        data.setdefault("rate", scenario.rate)
    return data


def load_config(path: Optional[Path], overrides: Dict[str, Any]) -> ExperimentConfig:
    data: Dict[str, Any] = {}
    if path is not None:
        data = _read_file(path)
        if "scenario" in data:
            data = _apply_scenario(data, path.parent)
        logger.info(f"Loaded experiment config from {path}")
    data.update({key: value for key, value in overrides.items() if value is not None})
    return ExperimentConfig(**data)
