"""Shape diagnostics for swept current curves.

Used for the run summaries: monotonic growth and saturation of J_1 against
the hot-bath temperature, and the single maximum of J_1 against delta.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .thermo import CAPTION_SATURATION_FACTOR, CLOSED_FORM_SATURATION_FACTOR

logger = logging.getLogger(__name__)

# Currents below this fraction of the curve maximum count as zero when looking for maxima
ZERO_FLOOR = 1e-6
MONOTONE_ATOL = 1e-13
MONOTONE_RTOL = 1e-9


def is_monotone_nondecreasing(values: Sequence[float], atol: float = MONOTONE_ATOL,
                              rtol: float = MONOTONE_RTOL) -> bool:
    """True if no step decreases by more than atol + rtol*|value|."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return True
    steps = np.diff(values)
    allowance = atol + rtol * np.abs(values[1:])
    return bool(np.all(steps >= -allowance))


def interior_maxima(values: Sequence[float], floor: float = ZERO_FLOOR) -> List[int]:
    """Indices of strict interior local maxima, ignoring flat runs and near-zero tails."""
    values = np.asarray(values, dtype=float)
    finite = values[np.isfinite(values)]
    if finite.size < 3:
        return []
    scale = float(np.max(np.abs(finite)))
    cleaned = np.where(np.abs(values) < floor * scale, 0.0, values)

    # collapse runs of equal values, remembering the first index of each run
    runs, starts = [], []
    for i, v in enumerate(cleaned):
        if not math.isfinite(v):
            continue
        if runs and v == runs[-1]:
            continue
        runs.append(v)
        starts.append(i)
    return [starts[k] for k in range(1, len(runs) - 1) if runs[k - 1] < runs[k] > runs[k + 1]]


def plateau_flatness(grid: Sequence[float], values: Sequence[float]) -> float:
    """|J(x_max) - J(x_max/2)| / |J(x_max)| with x_max/2 taken at the nearest grid point."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    last = values[-1]
    half = values[int(np.argmin(np.abs(grid - 0.5 * grid[-1])))]
    if last == 0.0:
        return math.inf
    return float(abs(last - half) / abs(last))


@dataclass
class CurveSummary:
    """Diagnostics for one swept curve; fields not applicable to the sweep variable stay None."""
    curve: str
    variable: str
    points: int
    flagged: int
    max_j1: float
    argmax: float
    monotone: Optional[bool] = None
    plateau_flatness: Optional[float] = None
    plateau_over_kappa_delta2: Optional[float] = None
    closed_form_constant: Optional[float] = None
    caption_constant: Optional[float] = None
    interior_maxima: Optional[int] = None
    maxima_locations: List[float] = field(default_factory=list)
    tail_ratio: Optional[float] = None

    def as_dict(self) -> Dict[str, object]:
        return dict(self.__dict__)


def summarize_curve(curve: str, variable: str, grid: Sequence[float], j1: Sequence[float],
                    flags: Sequence[str], kappa: float, delta: Optional[float]) -> CurveSummary:
    """Summary of J_1 along a sweep over the points that produced a current."""
    grid = np.asarray(grid, dtype=float)
    j1 = np.asarray(j1, dtype=float)
    good = np.isfinite(j1)
    x, y = grid[good], j1[good]

    if y.size == 0:
        logger.warning(f"Curve '{curve}': every point is flagged")
        return CurveSummary(curve=curve, variable=variable, points=int(grid.size),
                            flagged=int(grid.size), max_j1=math.nan, argmax=math.nan)

    peak = int(np.argmax(y))
    summary = CurveSummary(
        curve=curve,
        variable=variable,
        points=int(grid.size),
        flagged=sum(1 for flag in flags if flag),
        max_j1=float(y[peak]),
        argmax=float(x[peak]),
    )

    if variable == 't1':
        summary.monotone = is_monotone_nondecreasing(y)
        summary.plateau_flatness = plateau_flatness(x, y)
        if delta:
            summary.plateau_over_kappa_delta2 = float(y[-1] / (kappa * delta ** 2))
            summary.closed_form_constant = CLOSED_FORM_SATURATION_FACTOR
            summary.caption_constant = CAPTION_SATURATION_FACTOR
            logger.info(f"Curve '{curve}': plateau J1/(kappa delta^2) = {summary.plateau_over_kappa_delta2:.6g} "
                        f"(closed form 0.5, figure caption 0.25)")
    elif variable == 'delta':
        maxima = interior_maxima(y)
        summary.interior_maxima = len(maxima)
        summary.maxima_locations = [float(x[i]) for i in maxima]
        summary.tail_ratio = float(y[-1] / y[peak]) if y[peak] != 0.0 else math.nan
    return summary
