# Marks this directory as a package for absolute imports.

from .result_writer import ResultWriter
from .scenario_loader import Scenario, ScenarioLoader

__all__ = ["ResultWriter", "Scenario", "ScenarioLoader"]
