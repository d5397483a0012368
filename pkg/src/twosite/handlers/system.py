import logging
from typing import Optional, TYPE_CHECKING

from rich.panel import Panel
from rich.table import Table

from ..run_config import RunConfig
from ..utils.formatting import format_float, styled_flag, styled_value
from .common import emit_mapping

if TYPE_CHECKING:
    from ..service import CommandOptions, TwoSiteService

logger = logging.getLogger(__name__)


def _parameter_line(run: RunConfig) -> str:
    return (f"h={run.h:g}  delta={run.delta:g}  kappa={run.kappa:g}  s={run.exponent:g}  "
            f"k_B T1={run.t1:g}  k_B T2={run.t2:g}  model={run.model}")


# --- Eigen Handler ---
def handle_eigen(service: 'TwoSiteService', run: RunConfig, options: 'CommandOptions') -> Optional[int]:
    """Eigenvalues, amplitudes, rates and the identity residuals."""
    report = service.eigen(run)
    eig, rates = report.eig, report.rates

    table = Table(title="Eigenstructure", show_header=True, header_style="bold magenta")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for name, value in (("eps+", eig.eps_plus), ("eps-", eig.eps_minus), ("omega", eig.omega),
                        ("alpha+", eig.alpha_plus), ("alpha-", eig.alpha_minus),
                        ("beta+", eig.beta_plus), ("beta-", eig.beta_minus)):
        table.add_row(name, styled_value(value, 12))
    for i in (0, 1):
        table.add_row(f"Gamma+-({i + 1})", styled_value(rates.gamma_plus_minus[i]))
        table.add_row(f"Gamma-+({i + 1})", styled_value(rates.gamma_minus_plus[i]))
        table.add_row(f"gamma_{i + 1}(0)", styled_value(rates.gamma0[i]))
    table.add_row("gamma_phi", styled_value(rates.gamma_phi_eigen))
    service.console.print(Panel(_parameter_line(run), title="Parameters", expand=False))
    service.console.print(table)

    residuals = "\n".join(f"{name}: {value:.3e}" for name, value in report.identity_residuals.items())
    service.console.print(Panel(residuals, title="Identity residuals", border_style="cyan", expand=False))
    if rates.flags:
        service.console.print(f"[warning]Flags:[/warning] {', '.join(rates.flags)}")

    data = {
        "eps_plus": eig.eps_plus, "eps_minus": eig.eps_minus, "omega": eig.omega,
        "alpha_plus": eig.alpha_plus, "alpha_minus": eig.alpha_minus,
        "beta_plus": eig.beta_plus, "beta_minus": eig.beta_minus,
        "gamma_pm_1": rates.gamma_plus_minus[0], "gamma_pm_2": rates.gamma_plus_minus[1],
        "gamma_mp_1": rates.gamma_minus_plus[0], "gamma_mp_2": rates.gamma_minus_plus[1],
        "gamma0_1": rates.gamma0[0], "gamma0_2": rates.gamma0[1],
        "gamma_phi": rates.gamma_phi_eigen,
        "flag": ";".join(rates.flags),
    }
    emit_mapping(service, data, run, options)
    return None


# --- Steady Handler ---
def handle_steady(service: 'TwoSiteService', run: RunConfig, options: 'CommandOptions') -> Optional[int]:
    """Null-space steady state against the closed form, long-time propagation and the Gibbs state."""
    report = service.steady(run)
    site, eigen = report.site_state, report.eigen_state
    solution = report.solution

    table = Table(title=f"Steady state ({report.model.value} model)", show_header=True, header_style="bold magenta")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("<1|rho|1>", styled_value(site.populations[0], 12))
    table.add_row("<2|rho|2>", styled_value(site.populations[1], 12))
    table.add_row("Re rho_12", styled_value(site.coherence.real, 12))
    table.add_row("Im rho_12", styled_value(site.coherence.imag, 12))
    table.add_row("P++", styled_value(eigen.populations[0], 12))
    table.add_row("P--", styled_value(eigen.populations[1], 12))
    table.add_row("||L vec(rho)||", format_float(solution.residual, 3))
    table.add_row("sigma_min / sigma_max", format_float(solution.null_ratio, 3))
    if report.analytic_distance is not None:
        table.add_row("distance to closed form", format_float(report.analytic_distance, 3))
    table.add_row("distance to propagated", format_float(report.propagated_distance, 3))
    table.add_row(f"distance to Gibbs (k_B T={report.gibbs_temperature:g})", format_float(report.gibbs_distance, 3))
    service.console.print(Panel(_parameter_line(run), title="Parameters", expand=False))
    service.console.print(table)
    if report.flags:
        service.console.print(f"[warning]Flags:[/warning] {', '.join(report.flags)}")

    data = {
        "model": report.model.value,
        "rho11": site.populations[0], "rho22": site.populations[1],
        "rho12_re": site.coherence.real, "rho12_im": site.coherence.imag,
        "p_plus": eigen.populations[0], "p_minus": eigen.populations[1],
        "residual": solution.residual,
        "null_ratio": solution.null_ratio,
        "analytic_distance": report.analytic_distance,
        "propagated_distance": report.propagated_distance,
        "gibbs_distance": report.gibbs_distance,
        "flag": ";".join(report.flags),
    }
    emit_mapping(service, data, run, options)
    return None


# --- Current Handler ---
def handle_current(service: 'TwoSiteService', run: RunConfig, options: 'CommandOptions') -> Optional[int]:
    """Steady-state heat currents and the Fourier-law diagnostics."""
    summary = service.current(run)
    report, gradient = summary.report, summary.gradient

    table = Table(title=f"Heat currents ({summary.model.value} model)", show_header=True, header_style="bold magenta")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("J1 = Tr{L1[rho] H}", styled_value(report.j1, 12))
    table.add_row("J2 = Tr{L2[rho] H}", styled_value(report.j2, 12))
    table.add_row("d<H>/dt", styled_value(report.dH_dt, 12))
    table.add_row("J1 (model formula)", styled_value(summary.j1_check, 12))
    if summary.closed_form is not None:
        table.add_row("J1 (closed form)", styled_value(summary.closed_form, 12))
    if summary.saturation is not None:
        table.add_row("saturation J~ omega / 2", styled_value(summary.saturation, 6))
        table.add_row("caption value J~ omega / 4", styled_value(summary.caption_saturation, 6))
    table.add_row("n_bar", styled_value(gradient.n_bar, 6))
    table.add_row("delta_n", styled_value(gradient.delta_n, 6))
    table.add_row("(T2 - T1)/omega", styled_value(gradient.delta_n_linearized, 6))
    table.add_row("linearization error", format_float(gradient.relative_error, 3))
    if summary.identity_residual is not None:
        table.add_row("coherence identity residual", format_float(summary.identity_residual, 3))
    if summary.flags:
        table.add_row("flags", styled_flag(", ".join(summary.flags)))
    service.console.print(Panel(_parameter_line(run), title="Parameters", expand=False))
    service.console.print(table)

    data = {
        "model": summary.model.value,
        "j1": report.j1, "j2": report.j2, "dH_dt": report.dH_dt,
        "first_law_residual": report.first_law_residual,
        "j1_check": summary.j1_check,
        "closed_form": summary.closed_form,
        "saturation": summary.saturation,
        "caption_saturation": summary.caption_saturation,
        "n_bar": gradient.n_bar, "delta_n": gradient.delta_n,
        "delta_n_linearized": gradient.delta_n_linearized,
        "linearization_error": gradient.relative_error,
        "identity_residual": summary.identity_residual,
        "flag": ";".join(summary.flags),
    }
    emit_mapping(service, data, run, options)
    return None
