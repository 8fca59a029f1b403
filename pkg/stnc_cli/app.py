#########################################################################################
# Command-line entry point: one subcommand per experiment kind.
#########################################################################################
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from config import ExperimentKind, get_settings, load_config
from infra.error_handler import ConfigError, ErrorHandler
from stnc_cli.runner import ExperimentRunner, RunSummary

logger = logging.getLogger(__name__)
error_handler = ErrorHandler(logger)
console = Console(stderr=True)

SUMMARY_ROWS = 20


#########################################################################################
# Flag parsers. Every failure names the flag's config field.
#########################################################################################
def parse_int_list(field: str, text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        if ":" in text:
            lo, hi = (int(part) for part in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(field, f"expected a comma list or LO:HI range of integers, got '{text}'") from None


def parse_snr_grid(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        parts = [float(part) for part in text.split(":")]
    except ValueError:
        raise ConfigError("snr_db", f"expected LO:HI:STEP or a single value, got '{text}'") from None
    if len(parts) == 1:
        return parts
    if len(parts) != 3:
        raise ConfigError("snr_db", f"expected LO:HI:STEP or a single value, got '{text}'")
    lo, hi, step = parts
    if step <= 0.0 or hi < lo:
        raise ConfigError("snr_db", f"need LO <= HI and STEP > 0, got '{text}'")
    count = int((hi - lo) / step + 1e-9) + 1
    return [lo + i * step for i in range(count)]


def parse_range(text: Optional[str]) -> Optional[Tuple[float, float]]:
    if text is None:
        return None
    try:
        lo, hi = (float(part) for part in text.split(","))
    except ValueError:
        raise ConfigError("variance_range", f"expected LO,HI, got '{text}'") from None
    return lo, hi


def print_summary(summary: RunSummary, out: Path) -> None:
    table = Table(title=f"{len(summary.rows)} rows written to {out}")
    for column in summary.columns:
        table.add_column(column, justify="left" if column == "scheme" else "right")
    for row in summary.rows[:SUMMARY_ROWS]:
        table.add_row(*[_cell(row.get(column)) for column in summary.columns])
    if len(summary.rows) > SUMMARY_ROWS:
        table.caption = f"first {SUMMARY_ROWS} of {len(summary.rows)} rows"
    console.print(table)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


#########################################################################################
# Parse flags, build the config, run and summarise; the decorator maps failures to
# exit statuses.
#########################################################################################
@error_handler.with_exit_status()
def execute(kind: ExperimentKind, config_path: Optional[Path], flags: Dict[str, Any]) -> None:
    overrides: Dict[str, Any] = {
        "kind": kind,
        "relays": parse_int_list("relays", flags.get("relays")),
        "symbols": parse_int_list("symbols", flags.get("symbols")),
        "rate": flags.get("rate"),
        "snr_db": parse_snr_grid(flags.get("snr_db")),
        "schemes": list(flags["schemes"]) if flags.get("schemes") else None,
        "n_trials": flags.get("trials"),
        "seed": flags.get("seed"),
        "variance_range": parse_range(flags.get("variance_range")),
        "workers": flags.get("workers"),
        "out": flags.get("out"),
        "n_channels": flags.get("channels"),
        "n_noise": flags.get("noise"),
    }
    config = load_config(config_path, overrides)
    summary = ExperimentRunner(config).run()
    print_summary(summary, config.out)


def common_options(func: Any) -> Any:
    options = [
        click.option("--config", "config_path", type=click.Path(path_type=Path), help="JSON or YAML config file."),
        click.option("--relays", help="Relay counts K, e.g. '2,3'."),
        click.option("--symbols", help="Symbol counts M, e.g. '2' or '1:10'."),
        click.option("--rate", type=float, help="Target rate R in bit/s/Hz."),
        click.option("--snr-db", "snr_db", help="SNR grid 'LO:HI:STEP' or a single value in dB."),
        click.option("--trials", type=int, help="Monte Carlo trials per point."),
        click.option("--seed", type=int, help="Master seed."),
        click.option("--scheme", "schemes", multiple=True, help="Scheme to simulate (repeatable)."),
        click.option("--variance-range", "variance_range", help="Uniform variance range 'LO,HI'."),
        click.option("--workers", type=int, help="Worker processes."),
        click.option("--out", type=click.Path(path_type=Path), help="Output CSV path."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _dispatch(ctx: click.Context, kind: ExperimentKind, config_path: Optional[Path], **flags: Any) -> None:
    ctx.exit(execute(kind, config_path, flags))


@click.group()
@click.option("--log-level", default=None, help="Logging level (defaults to STNC_LOG_LEVEL).")
def cli(log_level: Optional[str]) -> None:
    """Outage and capacity experiments for cooperative relaying with overhearing."""
    level = (log_level or get_settings().log_level).upper()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True)],
    )


@cli.command("outage-sweep")
@common_options
@click.pass_context
def outage_sweep(ctx: click.Context, config_path: Optional[Path], **flags: Any) -> None:
    """Outage probability against SNR, with the closed-form overlay."""
    _dispatch(ctx, ExperimentKind.OUTAGE_SWEEP, config_path, **flags)


@cli.command("capacity-sweep")
@common_options
@click.pass_context
def capacity_sweep(ctx: click.Context, config_path: Optional[Path], **flags: Any) -> None:
    """Sum outage capacity against the number of symbols M."""
    _dispatch(ctx, ExperimentKind.CAPACITY_SWEEP, config_path, **flags)


@cli.command("validate-lemma1")
@common_options
@click.option("--channels", type=int, help="Channel draws per SNR point.")
@click.option("--noise", type=int, help="Noise traces per channel draw.")
@click.pass_context
def validate_lemma1(ctx: click.Context, config_path: Optional[Path], **flags: Any) -> None:
    """Recursive SNR expression against the simulated signal chain."""
    _dispatch(ctx, ExperimentKind.VALIDATE_LEMMA1, config_path, **flags)


@cli.command("compare-schemes")
@common_options
@click.pass_context
def compare_schemes(ctx: click.Context, config_path: Optional[Path], **flags: Any) -> None:
    """All schemes on common random numbers, with the dominance check."""
    _dispatch(ctx, ExperimentKind.COMPARE_SCHEMES, config_path, **flags)


def main() -> None:
    cli(prog_name="stnc")
