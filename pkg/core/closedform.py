#########################################################################################
# Closed-form performance: the Theorem 1 outage approximation, the exact direct-link
# outage, sum outage capacity and diversity-order fitting.
#########################################################################################
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from core.model import (
    DESTINATION,
    SOURCE,
    NetworkTopology,
    PowerAllocation,
    Scheme,
    mean_link_snr,
    outage_threshold,
    relay,
)
from infra.error_handler import ModelError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OutageCurvePoint:
    snr_db: float
    p_out: float
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_out <= 1.0:
            raise ModelError(f"outage probability must lie in [0, 1], got {self.p_out}")

    @property
    def rel_ci_width(self) -> float:
        if self.ci_lo is None or self.ci_hi is None:
            return 0.0
        if self.p_out == 0.0:
            return math.inf
        return (self.ci_hi - self.ci_lo) / self.p_out


def _zeta(topo: NetworkTopology, power: PowerAllocation, u: str, v: str) -> float:
    return 1.0 / mean_link_snr(topo, power, u, v)


#########################################################################################
# High-SNR closed form: relay 1 contributes (zeta_1d + zeta_s1), relays r >= 2
# only zeta_rd. Unclamped; can exceed 1 at low SNR.
#########################################################################################
def theorem1_outage_raw(topo: NetworkTopology, power: PowerAllocation, rate: float) -> float:
    k, m = topo.n_relays, topo.n_symbols
    if k < 1:
        raise ModelError("Theorem 1 needs at least one relay; use exact_direct_outage for K = 0")
    threshold = outage_threshold(Scheme.STNC_OHAF, m, k, rate)
    product = _zeta(topo, power, SOURCE, DESTINATION)
    product *= _zeta(topo, power, relay(1), DESTINATION) + _zeta(topo, power, SOURCE, relay(1))
    for r in range(2, k + 1):
        product *= _zeta(topo, power, relay(r), DESTINATION)
    return threshold ** (k + 1) / math.factorial(k + 1) * product


def theorem1_outage(topo: NetworkTopology, power: PowerAllocation, rate: float) -> float:
    raw = theorem1_outage_raw(topo, power, rate)
    if raw > 1.0:
        logger.debug(f"Theorem 1 value {raw:.3g} clamped to 1")
    return min(raw, 1.0)


#########################################################################################
# Leading high-SNR outage term for any scheme, from the same recursion as the SNR model.
# Outage needs K+1 weak links: S->D and, per relay, either R_r->D or S->R_r. Every other
# link is strong, so Gamma is linear in the weak SNRs and the event is a simplex.
# Without overhearing each relay picks its weak hop freely. With overhearing, R_r is cut
# off at the source only if R_1..R_{r-1} are too, so the source-blocked relays form a
# prefix 1..j; their SNRs reach D with weights c(1+c)^(j-r).
#########################################################################################
def first_order_outage_raw(topo: NetworkTopology, power: PowerAllocation, scheme: Scheme, rate: float) -> float:
    k, m = topo.n_relays, topo.n_symbols
    threshold = outage_threshold(scheme, m, k, rate)
    c = 1.0 / m if scheme.power_split else 1.0
    zeta_sr = [_zeta(topo, power, SOURCE, relay(r)) for r in range(1, k + 1)]
    zeta_rd = [_zeta(topo, power, relay(r), DESTINATION) for r in range(1, k + 1)]
    if scheme.overhearing:
        weak = sum(
            math.prod(zeta_sr[:j]) * math.prod(zeta_rd[j:]) / (1.0 + c) ** (j * (j - 1) // 2) for j in range(k + 1)
        )
    else:
        weak = math.prod(s + d for s, d in zip(zeta_sr, zeta_rd))
    direct = _zeta(topo, power, SOURCE, DESTINATION)
    return threshold ** (k + 1) / math.factorial(k + 1) * direct * weak / c**k


def first_order_outage(topo: NetworkTopology, power: PowerAllocation, scheme: Scheme, rate: float) -> float:
    return min(first_order_outage_raw(topo, power, scheme, rate), 1.0)


def exact_direct_outage(zeta_sd: float, gamma_th: float) -> float:
    if zeta_sd <= 0.0 or gamma_th < 0.0:
        raise ModelError(f"need zeta_sd > 0 and gamma_th >= 0, got {zeta_sd}, {gamma_th}")
    return -math.expm1(-zeta_sd * gamma_th)


def sum_outage_capacity(p_out: float, m: int, bandwidth: float = 1.0, rate: float = 1.0) -> float:
    if not 0.0 <= p_out <= 1.0:
        raise ModelError(f"outage probability must lie in [0, 1], got {p_out}")
    return m * (1.0 - p_out) * bandwidth * rate


#########################################################################################
# Highest-SNR contiguous run of points the simulation actually resolves.
#########################################################################################
def select_resolved_tail(points: Sequence[OutageCurvePoint], max_rel_ci_width: float = 0.3) -> List[OutageCurvePoint]:
    ordered = sorted(points, key=lambda p: p.snr_db)
    tail: List[OutageCurvePoint] = []
    for point in reversed(ordered):
        resolved = point.p_out > 0.0 and point.rel_ci_width < max_rel_ci_width
        if resolved:
            tail.append(point)
        elif tail:
            break
        else:
            logger.warning(f"Excluding unresolved point at {point.snr_db} dB (p_out={point.p_out:.3g})")
    return list(reversed(tail))


#########################################################################################
# Negated least-squares slope of log10(p_out) against log10(linear SNR).
#########################################################################################
def fit_diversity_order(points: Sequence[OutageCurvePoint]) -> float:
    usable = [p for p in points if p.p_out > 0.0]
    if len(usable) < len(points):
        logger.warning(f"Excluded {len(points) - len(usable)} zero-outage points from the diversity fit")
    if len(usable) < 3:
        raise ModelError(f"diversity fit needs at least 3 points with p_out > 0, got {len(usable)}")
    snr_db = np.array([p.snr_db for p in usable])
    if np.any(np.diff(snr_db) <= 0.0):
        raise ModelError("diversity fit needs strictly increasing SNRs")
    log_snr = snr_db / 10.0
    log_p = np.log10([p.p_out for p in usable])
    slope, _ = np.polyfit(log_snr, log_p, 1)
    return float(-slope)
