import io
import math

import numpy as np
import pytest
from rich.console import Console

from twosite.dynamics import Model
from twosite.errors import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_SOLVE_FAILED,
    ConfigError,
    DegenerateSteadyStateError,
    InvalidStateError,
)
from twosite.model import Basis, DensityMatrix, trace_distance
from twosite.run_config import RunConfig, SweepSpec, TimeGrid
from twosite.service import THEME, CommandOptions, TwoSiteService


@pytest.fixture
def console_buffer():
    return io.StringIO()


@pytest.fixture
def service(settings, console_buffer):
    return TwoSiteService(settings, Console(file=console_buffer, theme=THEME, width=200))


def curve_records(result, curve):
    return [r for r in result.records if r.curve == curve]


def site_matrix(record):
    coherence = complex(record.rho12_re, record.rho12_im)
    return DensityMatrix([[record.rho11, coherence], [coherence.conjugate(), record.rho22]], Basis.SITE)


# --- Single-point operations ---

def test_available_commands(service):
    assert service.get_available_commands() == ["eigen", "steady", "current", "evolve", "sweep", "compare"]


def test_eigen_identity_residuals(service):
    report = service.eigen(RunConfig(h=1.0, delta=0.5))
    assert report.eig.omega == pytest.approx(math.sqrt(2.0))
    assert max(report.identity_residuals.values()) < 1e-12


def test_steady_report_cross_checks(service):
    report = service.steady(RunConfig())
    assert report.model == Model.GLOBAL
    assert report.solution.residual < 1e-11
    assert report.analytic_distance < 1e-10
    assert report.propagated_distance < 5e-3
    assert report.gibbs_temperature == pytest.approx(0.15)
    assert report.flags == ()


def test_steady_equal_temperatures_is_gibbs(service):
    report = service.steady(RunConfig(t1=0.4, t2=0.4))
    assert report.gibbs_distance < 1e-10


def test_steady_local_has_no_closed_form_distance(service):
    report = service.steady(RunConfig(model='local'))
    assert report.analytic_distance is None
    np.testing.assert_allclose(report.site_state.populations, (0.5, 0.5), atol=1e-10)


def test_current_summary(service):
    summary = service.current(RunConfig(t1=1.0, t2=0.5))
    assert summary.report.j1 == pytest.approx(summary.closed_form, rel=1e-12)
    assert summary.j1_check == pytest.approx(summary.report.j1, rel=1e-12)
    assert summary.report.j2 == pytest.approx(-summary.report.j1, rel=1e-12)
    assert summary.saturation == pytest.approx(0.125)
    assert summary.caption_saturation == pytest.approx(0.0625)
    assert summary.identity_residual < 1e-12
    assert summary.gradient.delta_n < 0.0


def test_current_without_exchange_has_no_unique_steady_state(service):
    with pytest.raises(DegenerateSteadyStateError):
        service.current(RunConfig(delta=0.0))


# --- Sweeps ---

def test_fig2a_preset(service):
    result = service.run_preset('fig2a')
    assert len(result.records) == 600
    assert [s.curve for s in result.summaries] == ["delta=0.01", "delta=0.1", "delta=0.5"]

    plateaus = {}
    for summary in result.summaries:
        assert summary.monotone
        assert summary.flagged == 0
        assert summary.plateau_flatness < 0.02
        assert summary.plateau_over_kappa_delta2 == pytest.approx(0.5, rel=0.02)
        assert summary.closed_form_constant == 0.5
        assert summary.caption_constant == 0.25
        plateaus[summary.curve] = summary.max_j1

    assert plateaus["delta=0.1"] / plateaus["delta=0.5"] == pytest.approx(1.0 / 25.0, rel=0.01)
    for record in result.records:
        assert record.dual_path_deviation < 1e-10
        assert record.j1 + record.j2 == pytest.approx(0.0, abs=1e-14)

    last = curve_records(result, "delta=0.5")[-1]
    assert last.value == pytest.approx(100.0)
    n1, n2 = last.n_bar + 0.5 * -last.delta_n, last.n_bar + 0.5 * last.delta_n
    assert last.j1 == pytest.approx(0.25 * (n1 - n2) / (2.0 * (n1 + n2 + 1.0)), rel=1e-9)


def test_fig2b_preset(service):
    result = service.run_preset('fig2b')
    curves = ["t1=0.2", "t1=0.25", "t1=0.3"]
    assert [s.curve for s in result.summaries] == curves
    for summary in result.summaries:
        assert summary.interior_maxima == 1
        assert 0.0 < summary.maxima_locations[0] <= 2.0
        assert summary.tail_ratio < 1e-3

    series = [np.array([r.j1 for r in curve_records(result, c)]) for c in curves]
    assert all(len(s) == 300 for s in series)
    assert np.all(series[1] >= series[0] - 1e-13)
    assert np.all(series[2] >= series[1] - 1e-13)
    for values in series:
        assert values[-1] < 1e-3 * values.max()


@pytest.mark.parametrize("model", ["local", "classical"])
def test_non_global_models_carry_no_steady_current(service, model):
    run = RunConfig(model=model, t1=1.0, t2=0.5, sweep=SweepSpec(variable='t1', start=0.5, stop=2.0, points=8))
    result = service.run_sweep(run)
    assert len(result.records) == 8
    for record in result.records:
        assert abs(record.j1) < 1e-12
        assert abs(record.j1_check) < 1e-12
        assert record.flag == ""


def test_sweep_flags_failed_points_and_continues(service):
    run = RunConfig(sweep=SweepSpec(variable='delta', start=0.0, stop=1.0, points=5, scale='linear'))
    result = service.run_sweep(run)
    first, rest = result.records[0], result.records[1:]
    assert first.flag == "degenerate"
    assert math.isnan(first.j1)
    assert all(math.isfinite(r.j1) for r in rest)
    assert result.summaries[0].flagged == 1
    assert not result.all_failed


def test_sweep_with_divergent_rates_fails_everywhere(service):
    run = RunConfig(exponent=0.5, sweep=SweepSpec(variable='t1', start=0.1, stop=1.0, points=3))
    result = service.run_sweep(run)
    assert {r.flag for r in result.records} == {"divergent-rate"}
    assert result.all_failed


def test_sweep_needs_a_grid(service):
    with pytest.raises(ConfigError):
        service.run_sweep(RunConfig())


def test_parallel_sweep_keeps_grid_order(settings, console_buffer):
    run = RunConfig(sweep=SweepSpec(variable='t1', start=0.05, stop=5.0, points=24))
    serial = TwoSiteService(settings, Console(file=console_buffer, theme=THEME)).run_sweep(run)
    settings.set('SWEEP', 'workers', 4)
    parallel = TwoSiteService(settings, Console(file=console_buffer, theme=THEME)).run_sweep(run)
    assert [r.value for r in parallel.records] == [r.value for r in serial.records]
    np.testing.assert_allclose([r.j1 for r in parallel.records], [r.j1 for r in serial.records], rtol=1e-14)


# --- Model comparison ---

def test_low_temperature_pathology_of_local_model(service):
    result = service.compare_models(RunConfig(h=1.0, delta=1e-3, t1=1e-3, t2=1e-3))
    global_record, local_record = result.record('global'), result.record('local')
    assert global_record.site1_population > 0.999
    assert local_record.rho11 == pytest.approx(0.5, abs=1e-10)
    assert local_record.rho22 == pytest.approx(0.5, abs=1e-10)
    assert abs(local_record.j1) < 1e-12
    classical = result.record('classical')
    assert classical.flag != "degenerate"
    assert classical.rho11 == pytest.approx(0.5, abs=1e-10)
    assert abs(classical.j1) < 1e-12


def test_local_and_global_coincide_at_high_temperature(service):
    temperature = 100.0 * math.sqrt(2.0)
    result = service.compare_models(RunConfig(h=1.0, delta=0.5, t1=temperature, t2=temperature))
    distance = trace_distance(site_matrix(result.record('global')), site_matrix(result.record('local')))
    assert distance < 0.01
    assert result.record('global').gibbs_distance < 1e-10


def test_classical_model_is_maximally_mixed_without_current(service):
    result = service.compare_models(RunConfig(h=1.0, delta=0.5, t1=1.5, t2=0.6))
    record = result.record('classical')
    assert record.rho11 == pytest.approx(0.5, abs=1e-10)
    assert abs(record.rho12_re) < 1e-10
    assert abs(record.j1) < 1e-12
    with pytest.raises(KeyError):
        result.record('semiclassical')


# --- Evolution ---

def test_evolve_from_steady_state_is_stationary(service):
    run = RunConfig(t1=0.8, t2=0.3)
    rho_ss = service.steady(run).site_state.data
    entries = tuple(tuple(complex(v) for v in row) for row in rho_ss)
    result = service.evolve(RunConfig(t1=0.8, t2=0.3, rho0=entries, times=TimeGrid(0.0, 30.0, 7)))
    first = result.records[0]
    for record in result.records:
        assert record.rho11 == pytest.approx(first.rho11, abs=1e-10)
        assert record.rho12_re == pytest.approx(first.rho12_re, abs=1e-10)
        assert record.j1 == pytest.approx(first.j1, abs=1e-10)
        assert record.deviation < 1e-10


def test_evolve_without_exchange_keeps_site_populations(service):
    result = service.evolve(RunConfig(delta=0.0, t1=0.5, t2=0.2, rho0='site1'))
    assert len(result.records) == 50
    for record in result.records:
        assert record.rho11 == pytest.approx(1.0, abs=1e-12)
        assert record.rho22 == pytest.approx(0.0, abs=1e-12)


def test_evolve_excited_state_decays_at_zero_temperature(service):
    run = RunConfig(t1=0.0, t2=0.0, rho0='excited', times=TimeGrid(0.0, 8.0, 9))
    setup = service.build(run)
    result = service.evolve(run)
    for record in result.records:
        assert record.p_plus == pytest.approx(math.exp(-setup.rates.gamma_tot_pm * record.t), abs=1e-12)
        assert record.deviation < 1e-10
        assert record.model == "global"


def test_evolve_default_grid_reaches_relaxation_horizon(service):
    run = RunConfig()
    setup = service.build(run)
    result = service.evolve(run)
    assert result.times[-1] == pytest.approx(10.0 / setup.rates.gamma_total)
    assert result.records[-1].energy < result.records[0].energy


def test_evolve_local_transient_current_decays(service):
    result = service.evolve(RunConfig(model='local', t1=1.0, t2=0.1, rho0='site1'))
    currents = [abs(r.j1) for r in result.records]
    assert max(currents) > 1e-3
    assert currents[-1] < 1e-2 * max(currents)
    assert all(math.isnan(r.deviation) for r in result.records)


def test_explicit_initial_state_is_validated(service):
    run = RunConfig(rho0=((0.7 + 0j, 0j), (0j, 0.7 + 0j)))
    with pytest.raises(InvalidStateError):
        service.evolve(run)


# --- Command execution ---

def test_execute_command_success_writes_output(service, tmp_path):
    out = tmp_path / "current.csv"
    code = service.execute_command("current", RunConfig(t1=1.0, t2=0.5), CommandOptions(out=str(out)))
    assert code == EXIT_OK
    header, row = out.read_text().splitlines()
    assert header.split(",")[:2] == ["model", "j1"]
    assert row.startswith("global,")


def test_execute_command_exit_codes(service, console_buffer, tmp_path):
    options = CommandOptions(out=str(tmp_path / "out.csv"))
    assert service.execute_command("steady", RunConfig(delta=0.0), options) == EXIT_SOLVE_FAILED
    assert "Solve Failed" in console_buffer.getvalue()
    assert service.execute_command("sweep", RunConfig(), options) == EXIT_INVALID
    assert service.execute_command("current", RunConfig(exponent=0.5), options) == EXIT_SOLVE_FAILED
    assert service.execute_command("plot", RunConfig(), options) == EXIT_INVALID


def test_sweep_command_reports_total_failure(service, tmp_path):
    run = RunConfig(exponent=0.5, sweep=SweepSpec(variable='t1', start=0.1, stop=1.0, points=3))
    out = tmp_path / "sweep.csv"
    assert service.execute_command("sweep", run, CommandOptions(out=str(out))) == EXIT_SOLVE_FAILED
    assert out.read_text().count("divergent-rate") == 3


def test_resolve_output(service, settings):
    assert service.resolve_output(RunConfig(), CommandOptions()) is None
    assert str(service.resolve_output(RunConfig(), CommandOptions(out="x.csv"))) == "x.csv"
    resolved = service.resolve_output(RunConfig(output="runs/a.csv"), CommandOptions())
    assert str(resolved).endswith("runs/a.csv")
    assert str(resolved).startswith(settings.get('DEFAULT', 'output_dir'))
