"""Run configuration: physical parameters, sweep grid and the figure presets.

A run is described by one JSON document. Unknown keys anywhere in it are
rejected so that typos fail before any computation starts.
"""
import json
import logging
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .baths import BathSpec, SpectralDensity, Statistics
from .dynamics.liouvillian import Model
from .errors import ConfigError
from .model import STATE_PRESETS, SystemParams

logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ('t1', 't2', 'delta', 'h')
SWEEP_SCALES = ('linear', 'log')
PRESETS = ('fig2a', 'fig2b')

# Entries of an explicit rho0: numbers or [re, im] pairs
MatrixEntries = Tuple[Tuple[complex, complex], Tuple[complex, complex]]


def _check_keys(section: str, data: Mapping[str, Any], allowed: Sequence[str]):
    if not isinstance(data, Mapping):
        raise ConfigError(f"'{section}' must be a JSON object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key(s) in {section}: {', '.join(unknown)}. Allowed: {', '.join(allowed)}")


def _number(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class SweepSpec:
    """Grid over one run parameter."""
    variable: str
    start: float
    stop: float
    points: int = 200
    scale: str = 'log'

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"Invalid sweep variable '{self.variable}'. Allowed: {', '.join(SWEEP_VARIABLES)}")
        if self.scale not in SWEEP_SCALES:
            raise ConfigError(f"Invalid sweep scale '{self.scale}'. Allowed: {', '.join(SWEEP_SCALES)}")
        if isinstance(self.points, bool) or not isinstance(self.points, int) or self.points < 2:
            raise ConfigError(f"Sweep needs an integer number of points >= 2, got {self.points!r}")
        if not self.start < self.stop:
            raise ConfigError(f"Sweep start ({self.start}) must be below stop ({self.stop})")
        if self.start < 0.0:
            raise ConfigError(f"Sweep over {self.variable} cannot start below 0, got {self.start}")
        if self.scale == 'log' and self.start <= 0.0:
            raise ConfigError("A log-scaled sweep needs start > 0")

    def grid(self) -> np.ndarray:
        if self.scale == 'log':
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'SweepSpec':
        _check_keys('sweep', data, ('variable', 'start', 'stop', 'points', 'scale'))
        for required in ('variable', 'start', 'stop'):
            if required not in data:
                raise ConfigError(f"sweep.{required} is required")
        return cls(
            variable=str(data['variable']),
            start=_number('sweep', 'start', data['start']),
            stop=_number('sweep', 'stop', data['stop']),
            points=data.get('points', 200),
            scale=str(data.get('scale', 'log')),
        )


@dataclass(frozen=True)
class TimeGrid:
    """Evenly spaced output times for ``evolve``."""
    start: float = 0.0
    stop: float = 10.0
    points: int = 50

    def __post_init__(self):
        if self.start < 0.0:
            raise ConfigError(f"times.start must be >= 0, got {self.start}")
        if not self.start < self.stop:
            raise ConfigError(f"times.start ({self.start}) must be below times.stop ({self.stop})")
        if isinstance(self.points, bool) or not isinstance(self.points, int) or self.points < 2:
            raise ConfigError(f"times.points must be an integer >= 2, got {self.points!r}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'TimeGrid':
        _check_keys('times', data, ('start', 'stop', 'points'))
        return cls(
            start=_number('times', 'start', data.get('start', 0.0)),
            stop=_number('times', 'stop', data.get('stop', 10.0)),
            points=data.get('points', 50),
        )


def _parse_entry(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"rho0 entries must be numbers or [re, im] pairs, got {value!r}")
        return complex(_number('rho0', 're', value[0]), _number('rho0', 'im', value[1]))
    return complex(_number('rho0', 'entry', value))


def _parse_rho0(value: Any) -> Union[str, MatrixEntries]:
    if isinstance(value, str):
        if value not in STATE_PRESETS:
            raise ConfigError(f"Unknown rho0 preset '{value}'. Allowed: {', '.join(STATE_PRESETS)}")
        return value
    if not isinstance(value, (list, tuple)) or len(value) != 2 or any(
            not isinstance(row, (list, tuple)) or len(row) != 2 for row in value):
        raise ConfigError("rho0 must be a preset name or a 2x2 array of site-basis entries")
    return tuple(tuple(_parse_entry(entry) for entry in row) for row in value)


@dataclass(frozen=True)
class RunConfig:
    """Physical parameters and run options, energies in units of the reference h.

    Temperatures t1/t2 are k_B*T. ``statistics`` follows from the model
    when left empty (classical for the classical model, quantum otherwise).
    """
    h: float = 1.0
    delta: float = 0.5
    kappa: float = 1.0
    exponent: float = 1.0
    t1: float = 0.2
    t2: float = 0.1
    model: str = 'global'
    statistics: Optional[str] = None
    sweep: Optional[SweepSpec] = None
    times: Optional[TimeGrid] = None
    rho0: Union[str, MatrixEntries] = 'site1'
    output: Optional[str] = None
    label: str = ''

    def __post_init__(self):
        for key in ('h', 'delta', 't1', 't2'):
            value = getattr(self, key)
            if not math.isfinite(value) or value < 0.0:
                raise ConfigError(f"{key} must be finite and >= 0, got {value!r}")
        for key in ('kappa', 'exponent'):
            value = getattr(self, key)
            if not math.isfinite(value) or value <= 0.0:
                raise ConfigError(f"{key} must be finite and > 0, got {value!r}")
        if self.h == 0.0 and self.delta == 0.0 and not (self.sweep and self.sweep.variable in ('h', 'delta')):
            raise ConfigError("h and delta cannot both be zero")
        try:
            model = Model(self.model)
        except ValueError:
            raise ConfigError(f"Invalid model '{self.model}'. Allowed: {', '.join(m.value for m in Model)}") from None
        if self.statistics is not None:
            try:
                statistics = Statistics(self.statistics)
            except ValueError:
                raise ConfigError(
                    f"Invalid statistics '{self.statistics}'. Allowed: {', '.join(s.value for s in Statistics)}") from None
            if model == Model.GLOBAL and statistics != Statistics.QUANTUM:
                raise ConfigError("The global model needs quantum statistics")
            if model == Model.CLASSICAL and statistics != Statistics.CLASSICAL:
                raise ConfigError("The classical model needs classical statistics")

    @property
    def model_kind(self) -> Model:
        return Model(self.model)

    @property
    def bath_statistics(self) -> Statistics:
        if self.statistics is not None:
            return Statistics(self.statistics)
        return Statistics.CLASSICAL if self.model_kind == Model.CLASSICAL else Statistics.QUANTUM

    def system_params(self) -> SystemParams:
        return SystemParams(h=self.h, delta=self.delta)

    def baths(self) -> Tuple[BathSpec, BathSpec]:
        spectral = SpectralDensity(kappa=self.kappa, exponent=self.exponent)
        return (BathSpec(self.t1, spectral, self.bath_statistics),
                BathSpec(self.t2, spectral, self.bath_statistics))

    def at(self, variable: str, value: float) -> 'RunConfig':
        """Copy with one swept parameter replaced and the sweep removed."""
        return replace(self, sweep=None, **{variable: float(value)})

    def with_overrides(self, **overrides: Any) -> 'RunConfig':
        """Apply CLI overrides; ``None`` values are ignored."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if 'model' in changes and 'statistics' not in changes:
            changes['statistics'] = None
        return replace(self, **changes) if changes else self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if isinstance(self.rho0, tuple):
            data['rho0'] = [[[entry.real, entry.imag] for entry in row] for row in self.rho0]
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'RunConfig':
        allowed = ('h', 'delta', 'kappa', 'exponent', 't1', 't2', 'model', 'statistics',
                   'sweep', 'times', 'rho0', 'output', 'label')
        _check_keys('run config', data, allowed)
        kwargs: Dict[str, Any] = {}
        for key in ('h', 'delta', 'kappa', 'exponent', 't1', 't2'):
            if key in data:
                kwargs[key] = _number('run config', key, data[key])
        for key in ('model', 'statistics', 'output', 'label'):
            if data.get(key) is not None:
                kwargs[key] = str(data[key])
        if data.get('sweep') is not None:
            kwargs['sweep'] = SweepSpec.from_dict(data['sweep'])
        if data.get('times') is not None:
            kwargs['times'] = TimeGrid.from_dict(data['times'])
        if data.get('rho0') is not None:
            kwargs['rho0'] = _parse_rho0(data['rho0'])
        return cls(**kwargs)


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read a RunConfig from a JSON file.

    Raises:
        ConfigError: unreadable file, malformed JSON or invalid content.
    """
    path = Path(path).expanduser()
    try:
        with open(path) as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"Run config not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"Run config {path} is not valid JSON: {e}") from e
    logger.info(f"Loaded run config from {path}")
    return RunConfig.from_dict(data)


def preset_configs(name: str, model: str = 'global', points: int = 200) -> List[RunConfig]:
    """Expand a figure preset into one RunConfig per curve (h = 1 reference unit).

    fig2a: k_B T1 swept log-uniformly over [0.01, 100], k_B T2 = 0.01, delta in {0.01, 0.1, 0.5}.
    fig2b: delta swept log-uniformly over [1e-3, 20], k_B T2 = 0.1, k_B T1 in {0.2, 0.25, 0.3}.
    """
    if name == 'fig2a':
        sweep = SweepSpec(variable='t1', start=0.01, stop=100.0, points=points, scale='log')
        return [RunConfig(h=1.0, delta=delta, kappa=1.0, exponent=1.0, t1=0.01, t2=0.01,
                          model=model, sweep=sweep, label=f"delta={delta:g}")
                for delta in (0.01, 0.1, 0.5)]
    if name == 'fig2b':
        sweep = SweepSpec(variable='delta', start=1e-3, stop=20.0, points=max(points, 300), scale='log')
        return [RunConfig(h=1.0, delta=0.5, kappa=1.0, exponent=1.0, t1=t1, t2=0.1,
                          model=model, sweep=sweep, label=f"t1={t1:g}")
                for t1 in (0.2, 0.25, 0.3)]
    raise ConfigError(f"Unknown preset '{name}'. Allowed: {', '.join(PRESETS)}")
