import logging
import math
from typing import Optional, TYPE_CHECKING

from rich.panel import Panel
from rich.table import Table

from ..errors import EXIT_SOLVE_FAILED
from ..records import ComparisonRecord, EvolveRecord, SweepRecord
from ..run_config import RunConfig
from ..utils.formatting import format_float, styled_check, styled_flag, styled_value
from .common import emit_records

if TYPE_CHECKING:
    from ..service import CommandOptions, SweepResult, TwoSiteService

logger = logging.getLogger(__name__)


def _optional(value, digits: int = 6) -> str:
    return "-" if value is None else format_float(value, digits)


def _print_sweep_summary(service: 'TwoSiteService', result: 'SweepResult'):
    table = Table(title="Sweep summary", show_header=True, header_style="bold magenta")
    table.add_column("Curve", style="cyan")
    table.add_column("Points", justify="right")
    table.add_column("Flagged", justify="right")
    table.add_column("max J1", justify="right")
    table.add_column("at", justify="right")
    table.add_column("Monotone")
    table.add_column("Plateau flatness", justify="right")
    table.add_column("J1/(kappa delta^2)", justify="right")
    table.add_column("Interior maxima", justify="right")
    for s in result.summaries:
        table.add_row(
            s.curve,
            str(s.points),
            str(s.flagged),
            styled_value(s.max_j1),
            format_float(s.argmax, 6),
            styled_check(s.monotone) if s.monotone is not None else "-",
            _optional(s.plateau_flatness, 3),
            _optional(s.plateau_over_kappa_delta2),
            "-" if s.interior_maxima is None else str(s.interior_maxima),
        )
    service.console.print(table)

    plateaus = [s for s in result.summaries if s.plateau_over_kappa_delta2 is not None]
    if plateaus:
        s = plateaus[0]
        service.console.print(Panel(
            f"Closed-form saturation J1 -> {s.closed_form_constant:g} kappa delta^2; "
            f"the figure caption quotes {s.caption_constant:g} kappa delta^2.\n"
            f"Measured plateau: " + ", ".join(f"{p.curve}: {p.plateau_over_kappa_delta2:.4f}" for p in plateaus),
            title="Saturation constant", border_style="yellow", expand=False))
        logger.warning(f"Saturation: closed form {s.closed_form_constant:g} vs caption {s.caption_constant:g} "
                       f"(units of kappa delta^2)")


# --- Sweep Handler ---
def handle_sweep(service: 'TwoSiteService', run: RunConfig, options: 'CommandOptions') -> Optional[int]:
    """Steady-state J1 along a grid, or every curve of a figure preset."""
    if options.preset:
        result = service.run_preset(options.preset, model=run.model)
    else:
        result = service.run_sweep(run)

    emit_records(service, result.records, SweepRecord, run, options, summary=result.summary_dict())
    _print_sweep_summary(service, result)
    flagged = sum(1 for r in result.records if r.flag)
    if flagged:
        service.console.print(f"[warning]{flagged} record(s) carry a flag (see the 'flag' column).[/warning]")
    if result.all_failed:
        service.console.print("[error]Every sweep point failed; no steady state could be computed.[/error]")
        return EXIT_SOLVE_FAILED
    return None


# --- Compare Handler ---
def handle_compare(service: 'TwoSiteService', run: RunConfig, options: 'CommandOptions') -> Optional[int]:
    """Global, local and classical steady states for the same parameters."""
    result = service.compare_models(run)
    emit_records(service, result.records, ComparisonRecord, run, options)

    table = Table(title="Model comparison", show_header=True, header_style="bold magenta")
    table.add_column("Model", style="cyan")
    table.add_column("<1|rho|1>", justify="right")
    table.add_column("<2|rho|2>", justify="right")
    table.add_column("Re rho_12", justify="right")
    table.add_column("J1", justify="right")
    table.add_column(f"Gibbs distance (k_B T={result.gibbs_temperature:g})", justify="right")
    table.add_column("Flag")
    for rec in result.records:
        table.add_row(rec.model, styled_value(rec.rho11, 8), styled_value(rec.rho22, 8),
                      styled_value(rec.rho12_re, 8), styled_value(rec.j1, 8),
                      format_float(rec.gibbs_distance, 3), styled_flag(rec.flag))
    service.console.print(table)
    if all(math.isfinite(record.rho11) for record in result.records):
        service.console.print(
            f"Site-1 population: global {result.record('global').site1_population:.6f}, "
            f"local {result.record('local').site1_population:.6f}", style="info")
    if not any(math.isfinite(record.rho11) for record in result.records):
        return EXIT_SOLVE_FAILED
    return None


# --- Evolve Handler ---
def handle_evolve(service: 'TwoSiteService', run: RunConfig, options: 'CommandOptions') -> Optional[int]:
    """rho(t), the bath currents and <H_S>(t) on the time grid."""
    result = service.evolve(run)
    emit_records(service, result.records, EvolveRecord, run, options)

    first, last = result.records[0], result.records[-1]
    table = Table(title=f"Evolution ({run.model} model)", show_header=True, header_style="bold magenta")
    table.add_column("t", justify="right")
    table.add_column("<1|rho|1>", justify="right")
    table.add_column("P++", justify="right")
    table.add_column("J1", justify="right")
    table.add_column("J2", justify="right")
    table.add_column("<H>", justify="right")
    table.add_column("closed-form deviation", justify="right")
    for rec in (first, last):
        table.add_row(format_float(rec.t, 6), styled_value(rec.rho11, 8), styled_value(rec.p_plus, 8),
                      styled_value(rec.j1, 8), styled_value(rec.j2, 8), styled_value(rec.energy, 8),
                      format_float(rec.deviation, 3))
    service.console.print(table)
    return None
