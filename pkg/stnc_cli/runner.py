#########################################################################################
# Experiment runner: resolves topologies, drives the simulator and writes results.
#########################################################################################
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List

from config.experiment import ExperimentConfig, ExperimentKind
from core.baseband import gap_vs_snr
from core.model import NetworkTopology, power_from_snr_db, random_topology
from core.montecarlo import CapacityPoint, OutageSimulator, SweepPoint
from infra.error_handler import ErrorHandler
from infra.results import ResultWriter
from infra.results.result_writer import CAPACITY_COLUMNS, GAP_COLUMNS, OUTAGE_COLUMNS

logger = logging.getLogger(__name__)
error_handler = ErrorHandler(logger)


@dataclass
class RunSummary:
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)


class ExperimentRunner:
    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config
        self.simulator = OutageSimulator(workers=config.workers)
        self.writer = ResultWriter(config.out)
        self.logger = logging.getLogger(__name__)
        self.topologies: Dict[int, NetworkTopology] = {}

    #####################################################################################
    # One topology per relay count, reused across schemes, SNRs and symbol counts.
    #####################################################################################
    def topology(self, k: int, m: int) -> NetworkTopology:
        if k not in self.topologies:
            if self.config.variances is not None:
                topo = NetworkTopology(n_relays=k, n_symbols=m, variances=self.config.variances)
            else:
                topo = random_topology(k, m, self.config.variance_range, self.config.seed)
            self.topologies[k] = topo
        return self.topologies[k].with_symbols(m)

    def run(self) -> RunSummary:
        cfg = self.config
        self.logger.info(f"Starting {cfg.kind.value} (seed={cfg.seed}, trials={cfg.n_trials}, workers={cfg.workers})")
        if cfg.kind is ExperimentKind.CAPACITY_SWEEP:
            summary = self._capacity_sweep()
        elif cfg.kind is ExperimentKind.VALIDATE_LEMMA1:
            summary = self._validate_lemma1()
        else:
            summary = self._outage_sweep(with_dominance=cfg.kind is ExperimentKind.COMPARE_SCHEMES)

        self.writer.write_table(summary.rows, summary.columns)
        extra = {
            "topologies": {str(k): topo.to_document() for k, topo in sorted(self.topologies.items())},
            **summary.extra,
        }
        self.writer.write_manifest(cfg.resolved(), extra)
        self.logger.info(f"Finished {cfg.kind.value}: {len(summary.rows)} rows")
        return summary

    def _outage_row(self, point: SweepPoint) -> Dict[str, Any]:
        lo, hi = point.estimate.ci95
        return {
            "scheme": point.scheme.value,
            "K": point.k,
            "M": point.m,
            "R": point.rate,
            "snr_db": point.snr_db,
            "p_out_mc": point.estimate.p_hat,
            "ci_lo": lo,
            "ci_hi": hi,
            "p_out_theorem1": point.p_out_theorem1,
            "n_trials": point.estimate.n_trials,
            "seed": self.config.seed,
            "p_out_first_order": point.p_out_first_order,
        }

    def _outage_sweep(self, with_dominance: bool) -> RunSummary:
        cfg = self.config
        summary = RunSummary(OUTAGE_COLUMNS)
        dominance: List[Dict[str, Any]] = []
        for k in cfg.relays:
            for m in cfg.symbols:
                topo = self.topology(k, m)
                points = self.simulator.sweep_snr_schemes(
                    topo, cfg.schemes, cfg.rate, cfg.snr_db, cfg.n_trials, cfg.seed, cfg.n0
                )
                summary.rows.extend(self._outage_row(p) for p in points)
                if with_dominance:
                    for snr_db in cfg.snr_db:
                        power = power_from_snr_db(snr_db, k, m, cfg.n0)
                        fraction = self.simulator.dominance_fraction(topo, power, cfg.n_trials, cfg.seed)
                        dominance.append({"K": k, "M": m, "snr_db": snr_db, "ohaf_ge_af_fraction": fraction})
                        if fraction < 1.0:
                            self.logger.warning(f"Overhearing lowered the SNR in {1.0 - fraction:.3g} of realizations")
        if with_dominance:
            summary.extra["dominance"] = dominance
        return summary

    def _capacity_row(self, point: CapacityPoint) -> Dict[str, Any]:
        lo, hi = point.estimate.ci95
        return {
            "scheme": point.scheme.value,
            "K": point.k,
            "M": point.m,
            "R": point.rate,
            "snr_db": point.snr_db,
            "p_out_mc": point.estimate.p_hat,
            "ci_lo": lo,
            "ci_hi": hi,
            "c_soc": point.c_soc,
            "c_soc_lo": point.c_soc_ci[0],
            "c_soc_hi": point.c_soc_ci[1],
            "c_soc_theorem1": point.c_soc_theorem1,
            "n_trials": point.estimate.n_trials,
            "seed": self.config.seed,
        }

    def _capacity_sweep(self) -> RunSummary:
        cfg = self.config
        summary = RunSummary(CAPACITY_COLUMNS)
        for k in cfg.relays:
            topo = self.topology(k, cfg.symbols[0])
            for snr_db in cfg.snr_db:
                points = self.simulator.sweep_m_schemes(
                    topo, cfg.schemes, cfg.rate, k, cfg.symbols, snr_db, cfg.n_trials, cfg.seed, cfg.n0, cfg.bandwidth
                )
                summary.rows.extend(self._capacity_row(p) for p in points)
        return summary

    def _validate_lemma1(self) -> RunSummary:
        cfg = self.config
        summary = RunSummary(GAP_COLUMNS)
        reports: List[Dict[str, Any]] = []
        for k in cfg.relays:
            for m in cfg.symbols:
                topo = self.topology(k, m)
                reports_k = gap_vs_snr(topo, m, cfg.snr_db, cfg.n_channels, cfg.n_noise, cfg.seed, cfg.n0, cfg.workers)
                for report in reports_k:
                    document = report.to_dict()
                    reports.append(document)
                    summary.rows.append({column: document[column] for column in GAP_COLUMNS})
        self.writer.write_json(self.writer.sibling(".gap.json"), reports)
        summary.extra["gap_reports"] = reports
        return summary


#########################################################################################
# Run an experiment; returns the process exit status.
#########################################################################################
@error_handler.with_exit_status()
def run(config: ExperimentConfig) -> None:
    ExperimentRunner(config).run()
