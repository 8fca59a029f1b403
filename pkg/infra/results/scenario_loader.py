#####################################################################################
# Scenario documents: topology + power + rate as one JSON file.
# {"K": int, "M": int, "variances": {"s->1": num, ...}, "P_tot": num, "N0": num, "R": num}
#####################################################################################
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

from core.model import NetworkTopology, PowerAllocation, equal_split


@dataclass(frozen=True)
class Scenario:
    topology: NetworkTopology
    p_tot: float
    n0: float = 1.0
    rate: Optional[float] = None

    @property
    def power(self) -> PowerAllocation:
        return equal_split(self.p_tot, self.topology.n_relays, self.topology.n_symbols, self.n0)


class ScenarioLoader:
    """Reads and writes scenario documents."""

    def __init__(self) -> None:
        self.logger = logging.getLogger(__name__)

    #####################################################################################
    # Build a scenario from an already parsed document.
    #####################################################################################
    def from_document(self, document: Dict[str, Any]) -> Scenario:
        topology = NetworkTopology.from_document(document)
        rate = document.get("R")
        return Scenario(
            topology=topology,
            p_tot=float(document["P_tot"]),
            n0=float(document.get("N0", 1.0)),
            rate=None if rate is None else float(rate),
        )

    def to_document(self, scenario: Scenario) -> Dict[str, Any]:
        document = scenario.topology.to_document()
        document["P_tot"] = scenario.p_tot
        document["N0"] = scenario.n0
        if scenario.rate is not None:
            document["R"] = scenario.rate
        return document

    def load(self, path: Path) -> Scenario:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
        scenario = self.from_document(document)
        self.logger.info(f"Loaded scenario K={scenario.topology.n_relays} M={scenario.topology.n_symbols} from {path}")
        return scenario

    def save(self, scenario: Scenario, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_document(scenario), f, indent=2)
        return path
