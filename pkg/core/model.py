#########################################################################################
# Static problem description: relaying schemes, topology, power model, slot accounting
# and outage thresholds.
#########################################################################################
import logging
import math
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from infra.error_handler import ModelError

logger = logging.getLogger(__name__)

SOURCE = "s"
DESTINATION = "d"


class Scheme(str, Enum):
    STNC_OHAF = "STNC-OHAF"
    STNC_AF = "STNC-AF"
    TDMA_OH = "TDMA-OH"

    @property
    def overhearing(self) -> bool:
        return self is not Scheme.STNC_AF

    @property
    def power_split(self) -> bool:
        """True when relay power is shared across the M symbols of one slot."""
        return self is not Scheme.TDMA_OH

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        wanted = name.strip().upper().replace("_", "-")
        for scheme in cls:
            if scheme.value == wanted:
                return scheme
        raise ModelError(f"unknown scheme '{name}', expected one of {[s.value for s in cls]}")


class Link(NamedTuple):
    tx: str
    rx: str

    @property
    def key(self) -> str:
        return f"{self.tx}->{self.rx}"

    @classmethod
    def parse(cls, key: str) -> "Link":
        parts = key.replace(" ", "").split("->")
        if len(parts) != 2 or not all(parts):
            raise ModelError(f"malformed link key '{key}', expected e.g. 's->1'")
        return cls(parts[0].lower(), parts[1].lower())


def relay(r: int) -> str:
    return str(r)


#########################################################################################
# Canonical forward link order: S->R_1..S->R_K, S->D, then per relay R_r->R_j (j>r), R_r->D.
#########################################################################################
def forward_links(k: int) -> List[Link]:
    if k < 0:
        raise ModelError(f"relay count must be >= 0, got {k}")
    links = [Link(SOURCE, relay(r)) for r in range(1, k + 1)]
    links.append(Link(SOURCE, DESTINATION))
    for r in range(1, k + 1):
        links.extend(Link(relay(r), relay(j)) for j in range(r + 1, k + 1))
        links.append(Link(relay(r), DESTINATION))
    return links


def link_count(k: int) -> int:
    return (k + 1) + k * (k + 1) // 2


class NetworkTopology(BaseModel):
    """K relays, M symbols and the per-link channel-gain variance table."""

    model_config = ConfigDict(frozen=True)

    n_relays: int = Field(ge=0)
    n_symbols: int = Field(ge=1)
    variances: Dict[str, float]

    @model_validator(mode="after")
    def _check_links(self) -> "NetworkTopology":
        expected = {link.key for link in forward_links(self.n_relays)}
        given = set(self.variances)
        unknown = sorted(given - expected)
        if unknown:
            raise ValueError(f"links {unknown} are not forward links of a {self.n_relays}-relay network")
        missing = sorted(expected - given)
        if missing:
            raise ValueError(f"missing variance for links {missing}")
        for key, value in self.variances.items():
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"variance of {key} must be positive and finite, got {value}")
        return self

    @property
    def links(self) -> List[Link]:
        return forward_links(self.n_relays)

    def variance(self, link: Link) -> float:
        try:
            return self.variances[link.key]
        except KeyError:
            raise ModelError(f"{link.key} is not a forward link of this topology") from None

    def variance_vector(self) -> np.ndarray:
        return np.array([self.variances[link.key] for link in self.links], dtype=float)

    def with_symbols(self, m: int) -> "NetworkTopology":
        return NetworkTopology(n_relays=self.n_relays, n_symbols=m, variances=dict(self.variances))

    def to_document(self) -> Dict[str, Any]:
        return {
            "K": self.n_relays,
            "M": self.n_symbols,
            "variances": {link.key: self.variances[link.key] for link in self.links},
        }

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "NetworkTopology":
        variances = {Link.parse(key).key: float(value) for key, value in document["variances"].items()}
        return cls(n_relays=int(document["K"]), n_symbols=int(document["M"]), variances=variances)


class PowerAllocation(BaseModel):
    """Transmit powers of S and R_1..R_K plus the common noise power N0."""

    model_config = ConfigDict(frozen=True)

    p_source: float
    p_relay: Tuple[float, ...] = ()
    n0: float = 1.0

    @field_validator("p_source", "n0")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not math.isfinite(value) or value <= 0.0:
            raise ValueError(f"must be positive and finite, got {value}")
        return value

    @field_validator("p_relay")
    @classmethod
    def _positive_relays(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        for p in value:
            if not math.isfinite(p) or p <= 0.0:
                raise ValueError(f"relay powers must be positive and finite, got {p}")
        return value

    @property
    def p_total(self) -> float:
        return self.p_source + sum(self.p_relay)

    def power_of(self, node: str) -> float:
        if node == SOURCE:
            return self.p_source
        try:
            return self.p_relay[int(node) - 1]
        except (ValueError, IndexError):
            raise ModelError(f"no transmit power configured for node '{node}'") from None


def equal_split(p_tot: float, k: int, m: int, n0: float = 1.0) -> PowerAllocation:
    share = p_tot / (k + m)
    return PowerAllocation(p_source=share, p_relay=tuple([share] * k), n0=n0)


def power_from_snr_db(snr_db: float, k: int, m: int, n0: float = 1.0) -> PowerAllocation:
    return equal_split(n0 * 10.0 ** (snr_db / 10.0), k, m, n0)


def node_power_from_snr_db(snr_db: float, k: int, n0: float = 1.0) -> PowerAllocation:
    """Every node transmits at P with P/N0 equal to snr_db."""
    p = n0 * 10.0 ** (snr_db / 10.0)
    return PowerAllocation(p_source=p, p_relay=tuple([p] * k), n0=n0)


#########################################################################################
# Time slots consumed per transmission period.
#########################################################################################
def slot_count(scheme: Scheme, m: int, k: int) -> int:
    if m < 1:
        raise ModelError(f"symbol count must be >= 1, got {m}")
    if k < 0:
        raise ModelError(f"relay count must be >= 0, got {k}")
    if scheme is Scheme.TDMA_OH:
        return m + m * k
    return m + k


#########################################################################################
# Linear SNR below which the per-symbol mutual information falls short of the rate.
#########################################################################################
def outage_threshold(scheme: Scheme, m: int, k: int, rate: float) -> float:
    if not rate > 0.0:
        raise ModelError(f"rate must be positive, got {rate}")
    return 2.0 ** (slot_count(scheme, m, k) * rate) - 1.0


def mean_link_snr(topo: NetworkTopology, power: PowerAllocation, u: str, v: str) -> float:
    link = Link(u, v)
    return power.power_of(u) * topo.variance(link) / power.n0


def mean_snr_vector(topo: NetworkTopology, power: PowerAllocation) -> np.ndarray:
    if len(power.p_relay) != topo.n_relays:
        raise ModelError(f"power allocation has {len(power.p_relay)} relay powers for {topo.n_relays} relays")
    return np.array([mean_link_snr(topo, power, link.tx, link.rx) for link in topo.links], dtype=float)


#########################################################################################
# Draw every forward-link variance uniformly on [lo, hi], reproducibly from the seed.
#########################################################################################
def random_topology(k: int, m: int, variance_range: Tuple[float, float], seed: int) -> NetworkTopology:
    lo, hi = variance_range
    if not (0.0 < lo <= hi) or not math.isfinite(hi):
        raise ModelError(f"variance range must satisfy 0 < lo <= hi, got ({lo}, {hi})")
    links = forward_links(k)
    draws = np.random.default_rng(seed).uniform(lo, hi, size=len(links))
    variances = {link.key: float(min(max(value, lo), hi)) for link, value in zip(links, draws)}
    logger.debug(f"Drew {len(links)} link variances in [{lo}, {hi}] with seed {seed}")
    return NetworkTopology(n_relays=k, n_symbols=m, variances=variances)
