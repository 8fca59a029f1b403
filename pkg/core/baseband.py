#########################################################################################
# Signal-level oracle for the relaying chain: amplifier factors, MRC coefficients and the
# modeled noise-power recursion, plus the empirical SINR with the true, correlated noise.
#
# Spreading codes are ideal and orthonormal, so only the matched-filter output for
# symbol x_1 = 1 is simulated. A relay's receiver noise projects onto the M codes as M
# independent CN(0, N0) samples; only their sum over m enters the forwarded signal, so
# each relay-side noise source is drawn once with variance M*N0.
#########################################################################################
import logging
from dataclasses import dataclass, field
from multiprocessing import get_context
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.fading import ComplexGains, block_stream, draw_complex_gains, realization_from_gains
from core.model import (
    DESTINATION,
    SOURCE,
    Link,
    NetworkTopology,
    PowerAllocation,
    Scheme,
    forward_links,
    node_power_from_snr_db,
    relay,
)
from core.snr import end_to_end_snr
from infra.error_handler import ModelError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainState:
    n_relays: int
    n_symbols: int
    a: List[float]
    alpha: List[float]
    phi: Dict[Link, complex]
    chi: Dict[Link, float]
    a_d: float


@dataclass(frozen=True)
class GapReport:
    k: int
    m: int
    n_channels: int
    n_noise: int
    seed: int
    median_rel_err: float
    p95_rel_err: float
    median_rel_err_exact: float
    p95_rel_err_exact: float
    snr_db: Optional[float] = None
    rel_err: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "K": self.k,
            "M": self.m,
            "snr_db": self.snr_db,
            "median_rel_err": self.median_rel_err,
            "p95_rel_err": self.p95_rel_err,
            "median_rel_err_exact": self.median_rel_err_exact,
            "p95_rel_err_exact": self.p95_rel_err_exact,
            "n_channels": self.n_channels,
            "n_noise": self.n_noise,
            "seed": self.seed,
        }


#########################################################################################
# Relays in ascending order. A relay that received nothing (A_r = 0) stays silent:
# alpha_r = 0 and its outgoing copies carry no signal.
#########################################################################################
def build_chain(gains: ComplexGains, power: PowerAllocation, m: int) -> ChainState:
    if m < 1:
        raise ModelError(f"symbol count must be >= 1, got {m}")
    k, n0 = gains.n_relays, power.n0
    phi: Dict[Link, complex] = {}
    chi: Dict[Link, float] = {}
    for v in [relay(r) for r in range(1, k + 1)] + [DESTINATION]:
        link = Link(SOURCE, v)
        phi[link] = complex(np.sqrt(power.p_source) * gains[link] / n0)
        chi[link] = n0

    a: List[float] = []
    alpha: List[float] = []
    for r in range(1, k + 1):
        node = relay(r)
        a_r = n0 * abs(phi[Link(SOURCE, node)]) ** 2
        a_r += sum(chi[Link(relay(i), node)] * abs(phi[Link(relay(i), node)]) ** 2 for i in range(1, r))
        alpha_r = float(np.sqrt(power.power_of(node) / (m * (a_r**2 + a_r)))) if a_r > 0.0 else 0.0
        a.append(a_r)
        alpha.append(alpha_r)
        for v in [relay(j) for j in range(r + 1, k + 1)] + [DESTINATION]:
            link = Link(node, v)
            h = complex(gains[link])
            chi[link] = n0 + m * abs(h) ** 2 * alpha_r**2 * a_r
            phi[link] = h * alpha_r * a_r / chi[link]

    a_d = n0 * abs(phi[Link(SOURCE, DESTINATION)]) ** 2
    a_d += sum(chi[Link(relay(r), DESTINATION)] * abs(phi[Link(relay(r), DESTINATION)]) ** 2 for r in range(1, k + 1))
    return ChainState(k, m, a, alpha, phi, chi, a_d)


def transmit_power(chain: ChainState, r: int) -> float:
    """Average transmit power of relay r implied by its amplifier factor."""
    a_r = chain.a[r - 1]
    return chain.alpha[r - 1] ** 2 * chain.n_symbols * (a_r**2 + a_r)


def _noise_variances(k: int, m: int, n0: float) -> np.ndarray:
    return np.array([n0 if link.rx == DESTINATION else m * n0 for link in forward_links(k)])


#########################################################################################
# Literal propagation of the noise through the chain for n_noise independent traces.
# S_r is the noise a relay forwards (summed over the M symbol copies); every overheard
# copy carries the full forwarded noise of the earlier relay, hence the factor M.
#########################################################################################
def measure_empirical_sinr(
    gains: ComplexGains,
    power: PowerAllocation,
    m: int,
    n_noise: int,
    stream: np.random.Generator,
) -> float:
    chain = build_chain(gains, power, m)
    k = gains.n_relays
    links = forward_links(k)
    scale = np.sqrt(_noise_variances(k, m, power.n0) / 2.0)
    draws = stream.standard_normal((2, n_noise, len(links)))
    noise = {link: (draws[0, :, i] + 1j * draws[1, :, i]) * scale[i] for i, link in enumerate(links)}

    forwarded: List[np.ndarray] = []
    for r in range(1, k + 1):
        node = relay(r)
        s_r = np.conj(chain.phi[Link(SOURCE, node)]) * noise[Link(SOURCE, node)]
        for i in range(1, r):
            link = Link(relay(i), node)
            eta = noise[link] + m * gains[link] * chain.alpha[i - 1] * forwarded[i - 1]
            s_r = s_r + np.conj(chain.phi[link]) * eta
        forwarded.append(s_r)

    eta_d = np.conj(chain.phi[Link(SOURCE, DESTINATION)]) * noise[Link(SOURCE, DESTINATION)]
    for r in range(1, k + 1):
        link = Link(relay(r), DESTINATION)
        eta = noise[link] + gains[link] * chain.alpha[r - 1] * forwarded[r - 1]
        eta_d = eta_d + np.conj(chain.phi[link]) * eta
    return chain.a_d**2 / float(np.mean(np.abs(eta_d) ** 2))


#########################################################################################
# E|eta_d|^2 with every cross-correlation kept: eta_d is linear in one noise source per
# link, so propagating coefficient vectors gives the exact covariance.
#########################################################################################
def exact_noise_power(chain: ChainState, gains: ComplexGains, power: PowerAllocation) -> float:
    k, m = chain.n_relays, chain.n_symbols
    links = forward_links(k)
    index = {link: i for i, link in enumerate(links)}

    forwarded: List[np.ndarray] = []
    for r in range(1, k + 1):
        node = relay(r)
        c_r = np.zeros(len(links), dtype=complex)
        c_r[index[Link(SOURCE, node)]] = np.conj(chain.phi[Link(SOURCE, node)])
        for i in range(1, r):
            link = Link(relay(i), node)
            weight = np.conj(chain.phi[link])
            c_r[index[link]] += weight
            c_r += weight * m * gains[link] * chain.alpha[i - 1] * forwarded[i - 1]
        forwarded.append(c_r)

    e = np.zeros(len(links), dtype=complex)
    e[index[Link(SOURCE, DESTINATION)]] = np.conj(chain.phi[Link(SOURCE, DESTINATION)])
    for r in range(1, k + 1):
        link = Link(relay(r), DESTINATION)
        weight = np.conj(chain.phi[link])
        e[index[link]] += weight
        e += weight * gains[link] * chain.alpha[r - 1] * forwarded[r - 1]
    return float(np.sum(np.abs(e) ** 2 * _noise_variances(k, m, power.n0)))


def _gap_for_channel(task: Tuple[NetworkTopology, PowerAllocation, int, int, int, int]) -> Tuple[float, float]:
    topo, power, m, n_noise, seed, channel = task
    gains = draw_complex_gains(topo, block_stream(seed, channel, 0))
    chain = build_chain(gains, power, m)
    gamma = float(end_to_end_snr(realization_from_gains(gains, power), m, Scheme.STNC_OHAF))
    empirical = measure_empirical_sinr(gains, power, m, n_noise, block_stream(seed, channel, 1))
    exact = chain.a_d**2 / exact_noise_power(chain, gains, power)
    return abs(gamma / empirical - 1.0), abs(gamma / exact - 1.0)


#########################################################################################
# Lemma-1 SNR against the measured SINR over seeded channel draws.
#########################################################################################
def lemma1_gap_report(
    topo: NetworkTopology,
    power: PowerAllocation,
    m: int,
    k: int,
    n_channels: int,
    n_noise: int,
    seed: int,
    snr_db: Optional[float] = None,
    workers: int = 1,
) -> GapReport:
    if n_channels < 10:
        raise ModelError(f"gap report needs at least 10 channel draws, got {n_channels}")
    if topo.n_relays != k:
        raise ModelError(f"topology has {topo.n_relays} relays, report asked for K={k}")
    topo = topo.with_symbols(m)
    tasks = [(topo, power, m, n_noise, seed, channel) for channel in range(n_channels)]
    if workers > 1:
        with get_context().Pool(processes=min(workers, n_channels)) as pool:
            gaps = pool.map(_gap_for_channel, tasks)
    else:
        gaps = [_gap_for_channel(task) for task in tasks]
    rel_err = np.array([g[0] for g in gaps])
    rel_err_exact = np.array([g[1] for g in gaps])
    report = GapReport(
        k=k,
        m=m,
        n_channels=n_channels,
        n_noise=n_noise,
        seed=seed,
        median_rel_err=float(np.median(rel_err)),
        p95_rel_err=float(np.percentile(rel_err, 95)),
        median_rel_err_exact=float(np.median(rel_err_exact)),
        p95_rel_err_exact=float(np.percentile(rel_err_exact, 95)),
        snr_db=snr_db,
        rel_err=rel_err.tolist(),
    )
    where = "" if snr_db is None else f" {snr_db:g} dB"
    logger.info(
        f"Lemma-1 gap K={k} M={m}{where}: median {report.median_rel_err:.3g}, "
        f"p95 {report.p95_rel_err:.3g} (exact {report.median_rel_err_exact:.3g})"
    )
    return report


def gap_vs_snr(
    topo: NetworkTopology,
    m: int,
    snr_db_grid: Sequence[float],
    n_channels: int,
    n_noise: int,
    seed: int,
    n0: float = 1.0,
    workers: int = 1,
) -> List[GapReport]:
    k = topo.n_relays
    return [
        lemma1_gap_report(
            topo, node_power_from_snr_db(snr_db, k, n0), m, k, n_channels, n_noise, seed, snr_db=float(snr_db),
            workers=workers,
        )
        for snr_db in snr_db_grid
    ]
