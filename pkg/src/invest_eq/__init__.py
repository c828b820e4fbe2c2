"""Public and private content-provider investment under a neutral ISP.

Four allocation models share one utility: a centralized planner, a
cooperative game with coalition stability, the non-cooperative Nash
equilibrium and Nash bargaining.  ``oracle`` holds brute-force references
and ``experiments`` the parameter sweeps.
"""
from .bargaining import BargainSolution, disagreement_utility, solve_bargaining, water_fill
from .centralized import CentralSolution, foc_residual, gamma_centralized, solve_benchmark, solve_centralized
from .cooperative import (
    CooperativeSolution,
    coalition_value,
    deviation_utility,
    solve_cooperative,
    stability_margins,
)
from .errors import (
    ConfigError,
    ContractError,
    DomainError,
    InconsistencyError,
    ShapeError,
    SizeError,
)
from .model import (
    Allocation,
    CpParams,
    Market,
    Outcome,
    Special,
    evaluate,
    p_star,
    reduced_utility,
    utility,
)
from .nash import NashSolution, price_of_anarchy, solve_nash, utility_ratio_Gamma, verify_nash

__version__ = "0.1.0"
