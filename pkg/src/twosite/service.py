import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

# --- Rich for coloring ---
from rich.console import Console
from rich.theme import Theme

# --- Core Components ---
from .analysis import CurveSummary, summarize_curve
from .baths import BathSpec, RateSet, rate_set
from .config import config, TwoSiteConfig
from .dynamics import (
    Liouvillian,
    Model,
    SteadyStateSolution,
    analytic_state,
    build_liouvillian,
    gibbs_state,
    propagate,
    relaxation_horizon,
    solve_steady_state,
    steady_state_analytic,
    steady_state_by_propagation,
)
from .errors import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_SOLVE_FAILED,
    BasisMismatchError,
    ConfigError,
    DegenerateSteadyStateError,
    DivergentRateError,
    IllConditionedSolveError,
    InvalidParameterError,
    InvalidStateError,
    ModelMismatchError,
    NoExchangeError,
    TwoSiteError,
)
from .model import (
    Basis,
    DensityMatrix,
    Eigensystem,
    SystemParams,
    basis_state,
    change_basis,
    diagonalize,
    hamiltonian,
    site_coherence,
    trace_distance,
)
from .records import ComparisonRecord, EvolveRecord, SweepRecord
from .run_config import RunConfig, TimeGrid, preset_configs
from .thermo import (
    CurrentReport,
    OccupationGradient,
    caption_saturation_current,
    coherence_identity_residual,
    current_analytic,
    current_classical,
    current_closed_form,
    current_local,
    current_report,
    current_trace,
    energy_expectation,
    occupation_gradient,
    saturation_current,
)

# --- Handlers ---
from .handlers import (
    runs as run_handlers,
    system as system_handlers,
)

logger = logging.getLogger(__name__)

# --- Rich Console and Theme Setup ---
THEME = Theme({
    "info": "dim cyan",
    "warning": "yellow",
    "error": "bold red",
    "repr.str": "none",
})
# Tables and messages; records go to stdout
console = Console(stderr=True, theme=THEME)

# Per-point flags for failures inside a sweep
FAILURE_FLAGS = {
    DegenerateSteadyStateError: 'degenerate',
    IllConditionedSolveError: 'ill-conditioned',
    DivergentRateError: 'divergent-rate',
    NoExchangeError: 'no-exchange',
}


@dataclass
class ModelSetup:
    """Everything built from one RunConfig for one model."""
    run: RunConfig
    params: SystemParams
    eig: Eigensystem
    baths: Tuple[BathSpec, BathSpec]
    rates: RateSet
    liouvillian: Liouvillian

    @property
    def model(self) -> Model:
        return self.liouvillian.model


@dataclass
class EigenReport:
    params: SystemParams
    eig: Eigensystem
    rates: RateSet
    identity_residuals: Dict[str, float]


@dataclass
class SteadyReport:
    model: Model
    solution: SteadyStateSolution
    site_state: DensityMatrix
    eigen_state: DensityMatrix
    analytic_distance: Optional[float]
    propagated_distance: float
    gibbs_distance: float
    gibbs_temperature: float
    flags: Tuple[str, ...]


@dataclass
class CurrentSummary:
    """Steady-state currents by every available path."""
    model: Model
    report: CurrentReport
    j1_check: float
    closed_form: Optional[float]
    saturation: Optional[float]
    caption_saturation: Optional[float]
    gradient: OccupationGradient
    identity_residual: Optional[float]
    flags: Tuple[str, ...]


@dataclass
class SweepResult:
    records: List[SweepRecord]
    summaries: List[CurveSummary] = field(default_factory=list)

    @property
    def all_failed(self) -> bool:
        return bool(self.records) and all(not math.isfinite(r.j1) for r in self.records)

    def summary_dict(self) -> Dict[str, Any]:
        return {"curves": [s.as_dict() for s in self.summaries]}


@dataclass
class EvolveResult:
    records: List[EvolveRecord]
    initial_state: DensityMatrix
    times: np.ndarray


@dataclass
class ComparisonResult:
    records: List[ComparisonRecord]
    gibbs_temperature: float

    def record(self, model: str) -> ComparisonRecord:
        for rec in self.records:
            if rec.model == model:
                return rec
        raise KeyError(model)


@dataclass
class CommandOptions:
    """Output options shared by the run commands."""
    fmt: str = 'csv'
    out: Optional[str] = None
    digits: int = 17
    preset: Optional[str] = None


class TwoSiteService:
    """Runs the two-site computations for the CLI and renders results"""

    def __init__(self, twosite_config: Optional[TwoSiteConfig] = None, output_console: Optional[Console] = None):
        self.config = twosite_config if twosite_config else config
        self.console = output_console if output_console else console
        self.numerics = self.config.get_numerics()
        self.workers = self.config.getint('SWEEP', 'workers', 1)
        self._command_map = self._build_command_map()
        logger.debug(f"TwoSiteService initialized with numerics {self.numerics}")

    def _build_command_map(self) -> Dict[str, Dict[str, Any]]:
        return {
            "eigen": {"handler": system_handlers.handle_eigen, "help": "Eigenstructure and rates."},
            "steady": {"handler": system_handlers.handle_steady, "help": "Steady state with cross-checks."},
            "current": {"handler": system_handlers.handle_current, "help": "Steady-state heat currents."},
            "evolve": {"handler": run_handlers.handle_evolve, "help": "Time series of rho(t) and currents."},
            "sweep": {"handler": run_handlers.handle_sweep, "help": "Parameter sweep of the steady current."},
            "compare": {"handler": run_handlers.handle_compare, "help": "Global, local and classical side by side."},
        }

    def get_available_commands(self) -> List[str]:
        return list(self._command_map.keys())

    # --- Building blocks ---

    def build(self, run: RunConfig) -> ModelSetup:
        """Eigensystem, rates and Liouvillian for the run's model."""
        params = run.system_params()
        eig = diagonalize(params)
        baths = run.baths()
        rates = rate_set(eig, *baths)
        liouvillian = build_liouvillian(run.model_kind, params, eig, rates)
        return ModelSetup(run=run, params=params, eig=eig, baths=baths, rates=rates, liouvillian=liouvillian)

    def solve(self, setup: ModelSetup) -> SteadyStateSolution:
        return solve_steady_state(setup.liouvillian, self.numerics['null_space_rtol'])

    def initial_state(self, run: RunConfig, setup: ModelSetup) -> DensityMatrix:
        """rho0 from a preset name or explicit site-basis entries, in the Liouvillian's basis."""
        if isinstance(run.rho0, str):
            return basis_state(run.rho0, setup.eig, setup.liouvillian.basis)
        rho = DensityMatrix(run.rho0, Basis.SITE).validate(
            trace_tol=self.numerics['trace_tol'],
            psd_tol=self.numerics['psd_tol'],
            herm_tol=self.numerics['trace_tol'],
        )
        return change_basis(rho, setup.eig, setup.liouvillian.basis)

    def second_path_current(self, setup: ModelSetup, state: DensityMatrix) -> float:
        """J_1 from the model's own closed formula, independent of the dissipator trace."""
        if setup.model == Model.GLOBAL:
            return current_analytic(setup.rates, setup.eig, state)
        if setup.model == Model.LOCAL:
            return current_local(setup.rates, setup.params, change_basis(state, setup.eig, Basis.SITE))
        return current_classical(setup.rates, setup.eig, state)

    # --- Operations ---

    def eigen(self, run: RunConfig) -> EigenReport:
        params = run.system_params()
        eig = diagonalize(params)
        rates = rate_set(eig, *run.baths())
        h = hamiltonian(params)
        eigen_equation = max(
            float(np.max(np.abs(h @ eig.eigenvector(1) - eig.eps_plus * eig.eigenvector(1)))),
            float(np.max(np.abs(h @ eig.eigenvector(-1) - eig.eps_minus * eig.eigenvector(-1)))),
        )
        residuals = {
            "normalization": abs(eig.alpha_plus ** 2 + eig.alpha_minus ** 2 - 1.0),
            "exchange_coupling": abs(eig.exchange_coupling - params.delta / eig.omega),
            "eigenvalue_product": abs(eig.eps_plus * eig.eps_minus + params.delta ** 2),
            "population_contrast": abs((eig.alpha_plus ** 2 - eig.alpha_minus ** 2) ** 2 - (params.h / eig.omega) ** 2),
            "eigen_equation": eigen_equation,
        }
        return EigenReport(params=params, eig=eig, rates=rates, identity_residuals=residuals)

    def steady(self, run: RunConfig) -> SteadyReport:
        setup = self.build(run)
        solution = self.solve(setup)
        state = solution.state
        eigen_state = change_basis(state, setup.eig, Basis.EIGEN)
        site_state = change_basis(state, setup.eig, Basis.SITE)

        analytic_distance = None
        if setup.model != Model.LOCAL:
            analytic_distance = trace_distance(eigen_state, steady_state_analytic(setup.rates))

        propagated = steady_state_by_propagation(setup.liouvillian, self.initial_state(run, setup))
        temperature = 0.5 * (run.t1 + run.t2)
        gibbs = gibbs_state(setup.params, temperature, Basis.SITE)
        return SteadyReport(
            model=setup.model,
            solution=solution,
            site_state=site_state,
            eigen_state=eigen_state,
            analytic_distance=analytic_distance,
            propagated_distance=trace_distance(state, propagated),
            gibbs_distance=trace_distance(site_state, gibbs),
            gibbs_temperature=temperature,
            flags=setup.rates.flags,
        )

    def current(self, run: RunConfig) -> CurrentSummary:
        setup = self.build(run)
        state = self.solve(setup).state
        report = current_report(setup.liouvillian, state)

        closed_form = identity_residual = None
        if setup.model == Model.GLOBAL:
            closed_form = current_closed_form(setup.rates, setup.eig)
            identity_residual = coherence_identity_residual(state, setup.eig)
        saturation = caption = None
        if not setup.eig.no_exchange:
            saturation = saturation_current(setup.baths[0].spectral, setup.eig)
            caption = caption_saturation_current(setup.baths[0].spectral, setup.eig)
        return CurrentSummary(
            model=setup.model,
            report=report,
            j1_check=self.second_path_current(setup, state),
            closed_form=closed_form,
            saturation=saturation,
            caption_saturation=caption,
            gradient=occupation_gradient(setup.baths[0], setup.baths[1], setup.eig.omega),
            identity_residual=identity_residual,
            flags=setup.rates.flags,
        )

    def evolve(self, run: RunConfig) -> EvolveResult:
        """rho(t) by exact propagation, with the closed form alongside for the eigen-basis models."""
        setup = self.build(run)
        liouvillian, eig = setup.liouvillian, setup.eig
        rho0 = self.initial_state(run, setup)
        times = self._time_grid(run, liouvillian)
        rho0_eigen = change_basis(rho0, eig, Basis.EIGEN)

        records = []
        for t in times:
            state = propagate(liouvillian, rho0, float(t), self.numerics['eigvec_cond_limit'])
            site = change_basis(state, eig, Basis.SITE)
            eigen = change_basis(state, eig, Basis.EIGEN)
            deviation = math.nan
            if setup.model != Model.LOCAL:
                deviation = trace_distance(eigen, analytic_state(setup.rates, eig, rho0_eigen, float(t)))
            report = current_report(liouvillian, state)
            records.append(EvolveRecord(
                t=float(t),
                rho11=site.populations[0],
                rho22=site.populations[1],
                rho12_re=site.coherence.real,
                rho12_im=site.coherence.imag,
                p_plus=eigen.populations[0],
                p_minus=eigen.populations[1],
                j1=report.j1,
                j2=report.j2,
                energy=energy_expectation(liouvillian, state),
                deviation=deviation,
                model=setup.model.value,
            ))
        logger.info(f"Evolved {setup.model.value} model over {len(times)} time points")
        return EvolveResult(records=records, initial_state=rho0, times=times)

    def _time_grid(self, run: RunConfig, liouvillian: Liouvillian) -> np.ndarray:
        if run.times is not None:
            return run.times.grid()
        try:
            horizon = relaxation_horizon(liouvillian)
        except InvalidParameterError:
            logger.warning("No relaxation time scale; using the default time grid")
            return TimeGrid().grid()
        return TimeGrid(start=0.0, stop=horizon, points=50).grid()

    def sweep_point(self, run: RunConfig, variable: str, value: float) -> SweepRecord:
        """Steady state and both current paths at one grid point; failures become flagged rows."""
        curve = run.label or run.model
        try:
            setup = self.build(run.at(variable, value))
            state = self.solve(setup).state
            j1 = current_trace(setup.liouvillian, 0, state)
            j2 = current_trace(setup.liouvillian, 1, state)
            j1_check = self.second_path_current(setup, state)
            eigen = change_basis(state, setup.eig, Basis.EIGEN)
            rho12 = site_coherence(state, setup.eig)
            n1, n2 = setup.rates.occupations
            return SweepRecord(
                curve=curve,
                variable=variable,
                model=run.model,
                value=float(value),
                j1=j1,
                j1_check=j1_check,
                dual_path_deviation=abs(j1 - j1_check),
                j2=j2,
                p_plus=eigen.populations[0],
                p_minus=eigen.populations[1],
                rho12_re=rho12.real,
                rho12_im=rho12.imag,
                n_bar=0.5 * (n1 + n2),
                delta_n=n2 - n1,
                flag=";".join(setup.rates.flags),
            )
        except TwoSiteError as e:
            flag = next((name for cls, name in FAILURE_FLAGS.items() if isinstance(e, cls)), 'invalid')
            logger.warning(f"Sweep point {variable}={value:.6g} flagged '{flag}': {e}")
            nan = math.nan
            return SweepRecord(
                curve=curve, variable=variable, model=run.model, value=float(value),
                j1=nan, j1_check=nan, dual_path_deviation=nan, j2=nan, p_plus=nan, p_minus=nan,
                rho12_re=nan, rho12_im=nan, n_bar=nan, delta_n=nan, flag=flag,
            )

    def run_sweep(self, run: RunConfig) -> SweepResult:
        """One record per grid point in grid order, plus the curve summary."""
        if run.sweep is None:
            raise ConfigError("The sweep command needs a 'sweep' section in the run config or a --preset")
        spec = run.sweep
        grid = spec.grid()
        logger.info(f"Sweeping {spec.variable} over {spec.points} {spec.scale} points ({run.model} model)")

        def point(value: float) -> SweepRecord:
            return self.sweep_point(run, spec.variable, float(value))

        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                records = list(pool.map(point, grid))
        else:
            records = [point(value) for value in grid]

        delta = run.delta if spec.variable != 'delta' else None
        summary = summarize_curve(
            curve=run.label or run.model,
            variable=spec.variable,
            grid=grid,
            j1=[r.j1 for r in records],
            flags=[r.flag for r in records],
            kappa=run.kappa,
            delta=delta,
        )
        return SweepResult(records=records, summaries=[summary])

    def run_preset(self, name: str, model: str = 'global', points: Optional[int] = None) -> SweepResult:
        """All curves of a figure preset, concatenated in curve order."""
        if points is None:
            points = self.config.getint('SWEEP', 'default_points', 200)
        result = SweepResult(records=[])
        for run in preset_configs(name, model=model, points=points):
            curve = self.run_sweep(run)
            result.records.extend(curve.records)
            result.summaries.extend(curve.summaries)
        return result

    def compare_models(self, run: RunConfig) -> ComparisonResult:
        """Steady states of the three models for the same parameters."""
        temperature = 0.5 * (run.t1 + run.t2)
        gibbs = gibbs_state(run.system_params(), temperature, Basis.SITE)
        records = []
        for model in Model:
            try:
                setup = self.build(run.with_overrides(model=model.value))
                state = self.solve(setup).state
                site = change_basis(state, setup.eig, Basis.SITE)
                records.append(ComparisonRecord(
                    model=model.value,
                    rho11=site.populations[0],
                    rho22=site.populations[1],
                    rho12_re=site.coherence.real,
                    rho12_im=site.coherence.imag,
                    j1=current_trace(setup.liouvillian, 0, state),
                    j2=current_trace(setup.liouvillian, 1, state),
                    gibbs_distance=trace_distance(site, gibbs),
                    flag=";".join(setup.rates.flags),
                ))
            except (DegenerateSteadyStateError, IllConditionedSolveError) as e:
                flag = FAILURE_FLAGS[type(e)]
                logger.warning(f"{model.value} model flagged '{flag}': {e}")
                nan = math.nan
                records.append(ComparisonRecord(model=model.value, rho11=nan, rho22=nan, rho12_re=nan,
                                                rho12_im=nan, j1=nan, j2=nan, gibbs_distance=nan, flag=flag))
        return ComparisonResult(records=records, gibbs_temperature=temperature)

    # --- Output ---

    def resolve_output(self, run: RunConfig, options: CommandOptions) -> Optional[Path]:
        """--out as given; a run-config output path is taken relative to [DEFAULT] output_dir."""
        if options.out:
            return Path(options.out).expanduser()
        if run.output:
            return Path(self.config.get('DEFAULT', 'output_dir', '.')) / Path(run.output).expanduser()
        return None

    def execute_command(self, command: str, run: RunConfig, options: CommandOptions) -> int:
        """Run a registered command and map failures to exit codes."""
        logger.info(f"Executing command: {command} ({run.model} model)")
        if command not in self._command_map:
            self.console.print(f"[error]Unknown command:[/error] {command}. Available: {', '.join(self._command_map)}")
            return EXIT_INVALID
        handler: Callable[..., Optional[int]] = self._command_map[command]["handler"]
        try:
            code = handler(self, run, options)
            logger.info(f"Command {command} finished")
            return EXIT_OK if code is None else code
        except (DegenerateSteadyStateError, IllConditionedSolveError) as e:
            logger.error(f"Solve failed during {command}: {e}")
            self.console.print(f"[error]Solve Failed:[/error] {e}")
            return EXIT_SOLVE_FAILED
        except (DivergentRateError, NoExchangeError) as e:
            logger.error(f"Undefined quantity during {command}: {e}")
            self.console.print(f"[error]Undefined:[/error] {e}")
            return EXIT_SOLVE_FAILED
        except ConfigError as e:
            logger.warning(f"Invalid run configuration for {command}: {e}")
            self.console.print(f"[error]Invalid Configuration:[/error] {e}")
            return EXIT_INVALID
        except (InvalidParameterError, InvalidStateError, ModelMismatchError, BasisMismatchError) as e:
            logger.warning(f"Validation error during {command}: {e}")
            self.console.print(f"[error]Validation Error:[/error] {e}")
            return EXIT_INVALID
        except OSError as e:
            logger.error(f"I/O error during {command}: {e}")
            self.console.print(f"[error]I/O Error:[/error] {e}")
            return EXIT_INVALID
        except Exception as e:
            logger.error(f"Error executing command {command}: {e}", exc_info=True)
            self.console.print(f"[error]Unexpected Error:[/error] {type(e).__name__}: {e}")
            return EXIT_INVALID
