import logging
from typing import Any, Dict, Optional

import click

from ..config import ALLOWED_LOG_LEVELS, TwoSiteConfig
from ..dynamics import Model
from ..errors import EXIT_INVALID, ConfigError
from ..handlers import config as config_handlers
from ..output import OUTPUT_FORMATS
from ..run_config import PRESETS, RunConfig, load_run_config
from ..service import CommandOptions, TwoSiteService

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


# --- Parameter types exiting with status 1 ---
# click's own usage errors exit with 2, which is reserved for failed solves.

class InvalidOptionError(click.BadParameter):
    exit_code = EXIT_INVALID


class _ExitOnInvalid:
    def fail(self, message, param=None, ctx=None):
        raise InvalidOptionError(message, ctx=ctx, param=param)


class ChoiceOption(_ExitOnInvalid, click.Choice):
    pass


class FloatOption(_ExitOnInvalid, click.types.FloatParamType):
    pass


FLOAT = FloatOption()


def _configure_logging(level: int):
    # Only configure basicConfig if no handlers are already attached
    if not logging.getLogger().hasHandlers():
        logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger('twosite').setLevel(level)


def run_options(func):
    """Options shared by every run command."""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False),
                     help='Run configuration (JSON).'),
        click.option('--model', type=ChoiceOption([m.value for m in Model]),
                     help='Master-equation model.'),
        click.option('--out', type=click.Path(dir_okay=False), help='Write records here instead of stdout.'),
        click.option('--format', 'fmt', type=ChoiceOption(list(OUTPUT_FORMATS)),
                     help='Output format (default from [OUTPUT] format).'),
        click.option('--h', 'h', type=FLOAT, help='On-site splitting h.'),
        click.option('--delta', type=FLOAT, help='Inter-site coupling delta.'),
        click.option('--kappa', type=FLOAT, help='Spectral density prefactor.'),
        click.option('--exponent', type=FLOAT, help='Spectral density exponent s.'),
        click.option('--t1', type=FLOAT, help='k_B T of bath 1.'),
        click.option('--t2', type=FLOAT, help='k_B T of bath 2.'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _execute(ctx: click.Context, command: str, config_path: Optional[str], model: Optional[str],
             out: Optional[str], fmt: Optional[str], overrides: Dict[str, Any], preset: Optional[str] = None):
    """Build the RunConfig (failing fast on invalid input) and hand it to the service."""
    service: TwoSiteService = ctx.obj['service']
    try:
        run = load_run_config(config_path) if config_path else RunConfig()
        run = run.with_overrides(model=model, **overrides)
    except ConfigError as e:
        logger.warning(f"Invalid run configuration: {e}")
        service.console.print(f"[error]Invalid Configuration:[/error] {e}")
        ctx.exit(EXIT_INVALID)

    options = CommandOptions(
        fmt=fmt or service.config.get_output_format(),
        out=out,
        digits=service.config.getint('OUTPUT', 'significant_digits', 17),
        preset=preset,
    )
    ctx.exit(service.execute_command(command, run, options))


# --- Click CLI Definition ---

@click.group()
@click.option('--log-level', type=ChoiceOption(ALLOWED_LOG_LEVELS, case_sensitive=False),
              help='Override [DEFAULT] log_level.')
@click.option('--settings', type=click.Path(dir_okay=False),
              help='Application settings file (default: $TWOSITE_CONFIG_PATH or ~/.config/twosite/twosite.cfg).')
@click.pass_context
def cli(ctx, log_level, settings):
    """Heat transport through two sites coupled to dephasing baths."""
    app_config = TwoSiteConfig(settings) if settings else None
    service = TwoSiteService(app_config)
    level = getattr(logging, log_level.upper()) if log_level else service.config.get_log_level()
    _configure_logging(level)
    ctx.obj = {'service': service}


@cli.command()
@run_options
@click.pass_context
def eigen(ctx, config_path, model, out, fmt, **overrides):
    """Eigenvalues, amplitudes and transition rates."""
    _execute(ctx, 'eigen', config_path, model, out, fmt, overrides)


@cli.command()
@run_options
@click.pass_context
def steady(ctx, config_path, model, out, fmt, **overrides):
    """Steady state with closed-form, propagation and Gibbs cross-checks."""
    _execute(ctx, 'steady', config_path, model, out, fmt, overrides)


@cli.command()
@run_options
@click.pass_context
def current(ctx, config_path, model, out, fmt, **overrides):
    """Steady-state heat currents and the occupation gradient."""
    _execute(ctx, 'current', config_path, model, out, fmt, overrides)


@cli.command()
@run_options
@click.pass_context
def evolve(ctx, config_path, model, out, fmt, **overrides):
    """Time series of rho(t), J1(t), J2(t) and <H_S>(t)."""
    _execute(ctx, 'evolve', config_path, model, out, fmt, overrides)


@cli.command()
@run_options
@click.option('--preset', type=ChoiceOption(list(PRESETS)), help='Figure preset; fills in the sweep curves.')
@click.pass_context
def sweep(ctx, config_path, model, out, fmt, preset, **overrides):
    """Steady-state J1 over a parameter grid."""
    _execute(ctx, 'sweep', config_path, model, out, fmt, overrides, preset=preset)


@cli.command()
@run_options
@click.pass_context
def compare(ctx, config_path, model, out, fmt, **overrides):
    """Global, local and classical steady states side by side."""
    _execute(ctx, 'compare', config_path, model, out, fmt, overrides)


@cli.group('config')
def config_group():
    """Show or change application settings."""


@config_group.command('show')
@click.argument('section', required=False)
@click.pass_context
def config_show(ctx, section):
    """Show one section or all settings."""
    ctx.exit(config_handlers.handle_config_show(ctx.obj['service'], section))


@config_group.command('get')
@click.argument('section')
@click.argument('key')
@click.pass_context
def config_get(ctx, section, key):
    """Print a single setting."""
    ctx.exit(config_handlers.handle_config_get(ctx.obj['service'], section, key))


@config_group.command('set')
@click.argument('section')
@click.argument('key')
@click.argument('value')
@click.pass_context
def config_set(ctx, section, key, value):
    """Validate, set and save a setting."""
    ctx.exit(config_handlers.handle_config_set(ctx.obj['service'], section, key, value))


if __name__ == '__main__':
    cli()
