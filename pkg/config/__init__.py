from .experiment import ExperimentConfig, ExperimentKind, load_config
from .settings import Settings, get_settings

__all__ = ["ExperimentConfig", "ExperimentKind", "Settings", "get_settings", "load_config"]
