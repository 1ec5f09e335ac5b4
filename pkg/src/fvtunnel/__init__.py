"""Soliton-pair tunneling between false and true vacua of 1+1 dimensional scalar fields."""

__version__ = "0.1.0"

from .errors import FieldTheoryError  # noqa: E402
from .lattice import FieldConfig, Grid, make_grid  # noqa: E402
from .potentials import DrivenSineGordon, Phi4, Polynomial, Quadratic, classify_vacua  # noqa: E402
from .config import ScenarioConfig  # noqa: E402
from .transport import run_scenario, sweep_field  # noqa: E402

__all__ = [
    "__version__",
    "FieldTheoryError",
    "FieldConfig",
    "Grid",
    "make_grid",
    "DrivenSineGordon",
    "Phi4",
    "Polynomial",
    "Quadratic",
    "classify_vacua",
    "ScenarioConfig",
    "run_scenario",
    "sweep_field",
]
