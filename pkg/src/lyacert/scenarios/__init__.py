"""Ready-made certification scenarios and the generic model driver."""

from .common import EXIT_FEASIBLE, EXIT_INACCURATE, EXIT_INFEASIBLE, ScenarioResult
from .gd import GdConfig, run_gd
from .generic import run_generic
from .pdhg import PdhgQebConfig, run_pdhg_qeb
from .purecd import PurecdConfig, run_purecd
from .rcd import RcdConfig, run_rcd

__all__ = [
    "ScenarioResult",
    "EXIT_FEASIBLE",
    "EXIT_INFEASIBLE",
    "EXIT_INACCURATE",
    "GdConfig",
    "run_gd",
    "RcdConfig",
    "run_rcd",
    "PdhgQebConfig",
    "run_pdhg_qeb",
    "PurecdConfig",
    "run_purecd",
    "run_generic",
]
