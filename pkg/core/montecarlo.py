#########################################################################################
# Monte Carlo outage estimation over i.n.i.d. Rayleigh fading.
# Trials are split into work chunks of block_size rows; every chunk cuts its rows from
# stream blocks keyed by (seed, stream block), so neither chunk size nor worker count
# changes a single draw.
#########################################################################################
import logging
import math
from dataclasses import dataclass
from multiprocessing import get_context
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from config.settings import get_settings
from core.closedform import (
    OutageCurvePoint,
    exact_direct_outage,
    first_order_outage,
    sum_outage_capacity,
    theorem1_outage,
    theorem1_outage_raw,
)
from core.fading import FadingRealization, block_bounds, trial_snrs
from core.model import (
    DESTINATION,
    SOURCE,
    NetworkTopology,
    PowerAllocation,
    Scheme,
    mean_link_snr,
    mean_snr_vector,
    outage_threshold,
    power_from_snr_db,
)
from core.snr import end_to_end_snr
from infra.error_handler import ModelError

logger = logging.getLogger(__name__)

SMALL_COUNT = 10
Z_95 = float(stats.norm.ppf(0.975))


@dataclass(frozen=True)
class OutageEstimate:
    p_hat: float
    n_trials: int
    n_outages: int
    std_err: float
    ci95: Tuple[float, float]

    @property
    def rel_ci_width(self) -> float:
        if self.p_hat == 0.0:
            return math.inf
        return (self.ci95[1] - self.ci95[0]) / self.p_hat

    #####################################################################################
    # Normal interval, switching to Clopper-Pearson below SMALL_COUNT outage events.
    #####################################################################################
    @classmethod
    def from_counts(cls, n_outages: int, n_trials: int) -> "OutageEstimate":
        if n_trials < 1:
            raise ModelError(f"need at least one trial, got {n_trials}")
        p_hat = n_outages / n_trials
        std_err = math.sqrt(p_hat * (1.0 - p_hat) / n_trials)
        if n_outages < SMALL_COUNT or n_trials - n_outages < SMALL_COUNT:
            lo = 0.0 if n_outages == 0 else float(stats.beta.ppf(0.025, n_outages, n_trials - n_outages + 1))
            hi = 1.0 if n_outages == n_trials else float(stats.beta.ppf(0.975, n_outages + 1, n_trials - n_outages))
        else:
            lo = p_hat - Z_95 * std_err
            hi = p_hat + Z_95 * std_err
        lo = min(max(lo, 0.0), p_hat)
        hi = max(min(hi, 1.0), p_hat)
        return cls(p_hat, n_trials, n_outages, std_err, (lo, hi))

    def curve_point(self, snr_db: float) -> OutageCurvePoint:
        return OutageCurvePoint(snr_db, self.p_hat, self.ci95[0], self.ci95[1])


@dataclass(frozen=True)
class SweepPoint:
    scheme: Scheme
    k: int
    m: int
    rate: float
    snr_db: float
    estimate: OutageEstimate
    p_out_theorem1: Optional[float]
    p_out_theorem1_raw: Optional[float]
    p_out_first_order: float


@dataclass(frozen=True)
class CapacityPoint:
    scheme: Scheme
    k: int
    m: int
    rate: float
    snr_db: float
    estimate: OutageEstimate
    c_soc: float
    c_soc_ci: Tuple[float, float]
    c_soc_theorem1: Optional[float]


@dataclass(frozen=True)
class _BlockTask:
    n_relays: int
    n_symbols: int
    mean_snr: np.ndarray
    schemes: Tuple[Scheme, ...]
    thresholds: Tuple[float, ...]
    seed: int
    start: int
    stop: int


#########################################################################################
# One block of trials: outage counts per scheme plus the OHAF >= AF dominance count.
# Outage is Gamma < threshold strictly.
#########################################################################################
def _run_block(task: _BlockTask) -> Tuple[Tuple[int, ...], int]:
    matrix = trial_snrs(task.mean_snr, task.seed, task.start, task.stop)
    real = FadingRealization.from_matrix(task.n_relays, matrix)
    gammas = {scheme: end_to_end_snr(real, task.n_symbols, scheme) for scheme in task.schemes}
    counts = tuple(int(np.count_nonzero(gammas[s] < t)) for s, t in zip(task.schemes, task.thresholds))
    dominated = 0
    if Scheme.STNC_OHAF in gammas and Scheme.STNC_AF in gammas:
        dominated = int(np.count_nonzero(gammas[Scheme.STNC_OHAF] >= gammas[Scheme.STNC_AF]))
    return counts, dominated


def _sum_counts(results: Iterable[Tuple[Tuple[int, ...], int]], n_schemes: int) -> Tuple[List[int], int]:
    totals = [0] * n_schemes
    dominated = 0
    for counts, dom in results:
        totals = [a + b for a, b in zip(totals, counts)]
        dominated += dom
    return totals, dominated


def _theorem1_overlay(
    topo: NetworkTopology, power: PowerAllocation, scheme: Scheme, rate: float
) -> Tuple[Optional[float], Optional[float]]:
    if scheme is not Scheme.STNC_OHAF:
        return None, None
    if topo.n_relays == 0:
        threshold = outage_threshold(scheme, topo.n_symbols, 0, rate)
        exact = exact_direct_outage(1.0 / mean_link_snr(topo, power, SOURCE, DESTINATION), threshold)
        return exact, exact
    return theorem1_outage(topo, power, rate), theorem1_outage_raw(topo, power, rate)


class OutageSimulator:
    def __init__(self, workers: Optional[int] = None, block_size: Optional[int] = None) -> None:
        settings = get_settings()
        self.workers = workers or settings.workers
        self.block_size = block_size or settings.block_size
        self.logger = logging.getLogger(__name__)

    def _tasks(
        self,
        topo: NetworkTopology,
        power: PowerAllocation,
        schemes: Sequence[Scheme],
        rate: float,
        n_trials: int,
        seed: int,
    ) -> List[_BlockTask]:
        mean_snr = mean_snr_vector(topo, power)
        thresholds = tuple(outage_threshold(s, topo.n_symbols, topo.n_relays, rate) for s in schemes)
        return [
            _BlockTask(
                topo.n_relays,
                topo.n_symbols,
                mean_snr,
                tuple(schemes),
                thresholds,
                seed,
                block * self.block_size,
                block * self.block_size + rows,
            )
            for block, rows in block_bounds(n_trials, self.block_size)
        ]

    def _reduce(self, tasks: List[_BlockTask], n_schemes: int) -> Tuple[List[int], int]:
        if self.workers == 1 or len(tasks) == 1:
            return _sum_counts(map(_run_block, tasks), n_schemes)
        with get_context().Pool(processes=min(self.workers, len(tasks))) as pool:
            return _sum_counts(pool.imap_unordered(_run_block, tasks), n_schemes)

    #####################################################################################
    # All schemes on common random numbers in one pass over the trial blocks.
    #####################################################################################
    def estimate_schemes(
        self,
        topo: NetworkTopology,
        power: PowerAllocation,
        schemes: Sequence[Scheme],
        rate: float,
        n_trials: int,
        seed: int,
    ) -> Dict[Scheme, OutageEstimate]:
        if n_trials < 1:
            raise ModelError(f"need at least one trial, got {n_trials}")
        tasks = self._tasks(topo, power, schemes, rate, n_trials, seed)
        self.logger.debug(f"Running {len(tasks)} blocks of up to {self.block_size} trials on {self.workers} worker(s)")
        totals, _ = self._reduce(tasks, len(schemes))
        return {scheme: OutageEstimate.from_counts(count, n_trials) for scheme, count in zip(schemes, totals)}

    def estimate_outage(
        self,
        topo: NetworkTopology,
        power: PowerAllocation,
        scheme: Scheme,
        rate: float,
        n_trials: int,
        seed: int,
    ) -> OutageEstimate:
        return self.estimate_schemes(topo, power, [scheme], rate, n_trials, seed)[scheme]

    #####################################################################################
    # Share of realizations where overhearing does not lower the end-to-end SNR.
    #####################################################################################
    def dominance_fraction(self, topo: NetworkTopology, power: PowerAllocation, n_trials: int, seed: int) -> float:
        tasks = self._tasks(topo, power, [Scheme.STNC_OHAF, Scheme.STNC_AF], 1.0, n_trials, seed)
        _, dominated = self._reduce(tasks, 2)
        return dominated / n_trials

    def sweep_snr_schemes(
        self,
        topo_template: NetworkTopology,
        schemes: Sequence[Scheme],
        rate: float,
        snr_db_grid: Sequence[float],
        n_trials: int,
        seed: int,
        n0: float = 1.0,
    ) -> List[SweepPoint]:
        if any(b <= a for a, b in zip(snr_db_grid, snr_db_grid[1:])):
            raise ModelError(f"SNR grid must be strictly increasing, got {list(snr_db_grid)}")
        k, m = topo_template.n_relays, topo_template.n_symbols
        points: List[SweepPoint] = []
        for snr_db in snr_db_grid:
            power = power_from_snr_db(snr_db, k, m, n0)
            estimates = self.estimate_schemes(topo_template, power, schemes, rate, n_trials, seed)
            for scheme in schemes:
                overlay, overlay_raw = _theorem1_overlay(topo_template, power, scheme, rate)
                point = SweepPoint(
                    scheme=scheme,
                    k=k,
                    m=m,
                    rate=rate,
                    snr_db=float(snr_db),
                    estimate=estimates[scheme],
                    p_out_theorem1=overlay,
                    p_out_theorem1_raw=overlay_raw,
                    p_out_first_order=first_order_outage(topo_template, power, scheme, rate),
                )
                points.append(point)
                self.logger.info(
                    f"{scheme.value} K={k} M={m} {snr_db:g} dB: p_out={point.estimate.p_hat:.4g} "
                    f"({point.estimate.n_outages}/{n_trials})"
                )
        return points

    def sweep_snr(
        self,
        topo_template: NetworkTopology,
        scheme: Scheme,
        rate: float,
        snr_db_grid: Sequence[float],
        n_trials: int,
        seed: int,
        n0: float = 1.0,
    ) -> List[SweepPoint]:
        return self.sweep_snr_schemes(topo_template, [scheme], rate, snr_db_grid, n_trials, seed, n0)

    #####################################################################################
    # Sum outage capacity against the number of symbols M at a fixed transmit SNR.
    #####################################################################################
    def sweep_m_schemes(
        self,
        topo_template: NetworkTopology,
        schemes: Sequence[Scheme],
        rate: float,
        k: int,
        m_grid: Sequence[int],
        snr_db: float,
        n_trials: int,
        seed: int,
        n0: float = 1.0,
        bandwidth: float = 1.0,
    ) -> List[CapacityPoint]:
        if topo_template.n_relays != k:
            raise ModelError(f"topology has {topo_template.n_relays} relays, sweep asked for K={k}")
        if any(m < 1 for m in m_grid):
            raise ModelError(f"symbol counts must be >= 1, got {list(m_grid)}")
        points: List[CapacityPoint] = []
        for m in m_grid:
            topo = topo_template.with_symbols(m)
            power = power_from_snr_db(snr_db, k, m, n0)
            estimates = self.estimate_schemes(topo, power, schemes, rate, n_trials, seed)
            for scheme in schemes:
                estimate = estimates[scheme]
                overlay, _ = _theorem1_overlay(topo, power, scheme, rate)
                lo, hi = estimate.ci95
                points.append(
                    CapacityPoint(
                        scheme=scheme,
                        k=k,
                        m=m,
                        rate=rate,
                        snr_db=float(snr_db),
                        estimate=estimate,
                        c_soc=sum_outage_capacity(estimate.p_hat, m, bandwidth, rate),
                        c_soc_ci=(
                            sum_outage_capacity(hi, m, bandwidth, rate),
                            sum_outage_capacity(lo, m, bandwidth, rate),
                        ),
                        c_soc_theorem1=None if overlay is None else sum_outage_capacity(overlay, m, bandwidth, rate),
                    )
                )
            summary = ", ".join(f"{s.value} p_out={estimates[s].p_hat:.4g}" for s in schemes)
            self.logger.info(f"K={k} M={m} {snr_db:g} dB: {summary}")
        return points

    def sweep_m(
        self,
        topo_template: NetworkTopology,
        scheme: Scheme,
        rate: float,
        k: int,
        m_grid: Sequence[int],
        snr_db: float,
        n_trials: int,
        seed: int,
        n0: float = 1.0,
        bandwidth: float = 1.0,
    ) -> List[CapacityPoint]:
        return self.sweep_m_schemes(topo_template, [scheme], rate, k, m_grid, snr_db, n_trials, seed, n0, bandwidth)


def estimate_outage(
    topo: NetworkTopology,
    power: PowerAllocation,
    scheme: Scheme,
    rate: float,
    n_trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> OutageEstimate:
    return OutageSimulator(workers=workers).estimate_outage(topo, power, scheme, rate, n_trials, seed)
