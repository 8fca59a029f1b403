# Marks this directory as a package for absolute imports.
from typing import Callable, Dict, Optional

import pytest

from config.settings import get_settings
from core.model import NetworkTopology, forward_links


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch):
    """Settings are cached per process; tests must not see each other's env."""
    for name in ("STNC_WORKERS", "STNC_BLOCK_SIZE", "STNC_DEFAULT_SEED", "STNC_RESULTS_DIR", "STNC_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def make_topology() -> Callable[..., NetworkTopology]:
    def _make(k: int, m: int = 1, variance: float = 1.0, overrides: Optional[Dict[str, float]] = None):
        variances = {link.key: variance for link in forward_links(k)}
        variances.update(overrides or {})
        return NetworkTopology(n_relays=k, n_symbols=m, variances=variances)

    return _make


@pytest.fixture
def two_relay_variances() -> Dict[str, float]:
    return {"s->1": 2.0, "s->2": 1.5, "s->d": 0.5, "1->2": 4.0, "1->d": 1.0, "2->d": 3.0}
