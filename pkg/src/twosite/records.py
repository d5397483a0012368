"""Row types emitted by the service and written by ``twosite.output``.

Each numeric field carries its unit in the dataclass metadata; the CSV
header is built from it. Energies and temperatures are in units of the
reference energy h, currents in h**2 (hbar = 1).
"""
from dataclasses import dataclass, field

ENERGY = 'h'
CURRENT = 'h^2'
TIME = '1/h'
DIMENSIONLESS = '1'


def unit(name: str):
    return field(metadata={'unit': name})


@dataclass(frozen=True)
class SweepRecord:
    """One grid point of a sweep; ``j1_check`` is the second, formula-based current path."""
    curve: str
    variable: str
    model: str
    value: float = unit(ENERGY)
    j1: float = unit(CURRENT)
    j1_check: float = unit(CURRENT)
    dual_path_deviation: float = unit(CURRENT)
    j2: float = unit(CURRENT)
    p_plus: float = unit(DIMENSIONLESS)
    p_minus: float = unit(DIMENSIONLESS)
    rho12_re: float = unit(DIMENSIONLESS)
    rho12_im: float = unit(DIMENSIONLESS)
    n_bar: float = unit(DIMENSIONLESS)
    delta_n: float = unit(DIMENSIONLESS)
    flag: str = ''


@dataclass(frozen=True)
class EvolveRecord:
    """State and energy balance at one time; ``deviation`` is the trace distance to the closed form."""
    t: float = unit(TIME)
    rho11: float = unit(DIMENSIONLESS)
    rho22: float = unit(DIMENSIONLESS)
    rho12_re: float = unit(DIMENSIONLESS)
    rho12_im: float = unit(DIMENSIONLESS)
    p_plus: float = unit(DIMENSIONLESS)
    p_minus: float = unit(DIMENSIONLESS)
    j1: float = unit(CURRENT)
    j2: float = unit(CURRENT)
    energy: float = unit(ENERGY)
    deviation: float = unit(DIMENSIONLESS)
    model: str = ''


@dataclass(frozen=True)
class ComparisonRecord:
    """Steady state of one model for the shared physical parameters."""
    model: str
    rho11: float = unit(DIMENSIONLESS)
    rho22: float = unit(DIMENSIONLESS)
    rho12_re: float = unit(DIMENSIONLESS)
    rho12_im: float = unit(DIMENSIONLESS)
    j1: float = unit(CURRENT)
    j2: float = unit(CURRENT)
    gibbs_distance: float = unit(DIMENSIONLESS)
    flag: str = ''

    @property
    def site1_population(self) -> float:
        """<1|rho_ss|1>, the low-temperature pathology indicator."""
        return self.rho11
