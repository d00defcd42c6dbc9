"""Control of routing games on parallel networks.

Flows over a small set of parallel edges evolve under partially
compliant rerouting; a finite-horizon quadratic program steers them
toward the Nash equilibrium of the underlying congestion game. The
package covers the exact Nash solver, the condensed quadratic program
and its active-set solution, the explicit piecewise-affine control law
with its critical regions, closed-loop and learning simulations, and a
Markov-chain flow model for general road networks, all behind a
``routegame`` command-line interface.
"""

from .dynamics import (
    GameDynamics,
    averaging_A_state,
    reduced_problem_averaging_A,
    steady_state_averaging_B,
    step,
    uniform_averaging,
)
from .exceptions import (
    ConfigError,
    CyclicGraphError,
    DomainError,
    RegionBudgetError,
    RegionNotFoundError,
    SimplexError,
    SingularDynamicsError,
    SolverError,
    StochasticityError,
)
from .estimators import ExplicitMpcRouter, RecedingHorizonRouter
from .markov import (
    LineGraph,
    RoadNetwork,
    aggregate_path_flows,
    demand_balance_check,
    enumerate_paths,
    equilibrium_flow,
    expected_path_flows,
    line_graph,
    nilpotency_index,
    path_probabilities,
    topological_order,
)
from .network import (
    AffineLatency,
    ParallelNetwork,
    QuadraticCost,
    cost_from_network,
    equilibrium_support,
    latency_vector,
    nash_equilibrium,
    network_from_coefficients,
    rosenthal_potential,
    social_welfare,
)
from .qp import (
    CondensedQp,
    HorizonProblem,
    QpSolution,
    RiccatiSequence,
    condense,
    dare_sequence,
    riccati_recursion,
    rollout_value,
    solve_qp,
    solve_qp_exhaustive,
    value_function,
)
from .regions import (
    CriticalRegion,
    LawReport,
    PwaControlLaw,
    control_at,
    enumerate_regions,
    export_regions,
    law_from_dict,
    law_from_json,
    law_to_dict,
    lookup,
    polygon_area,
    region_polygons,
    ternary_projection,
    verify_law,
)
from .simulate import (
    LearnerConfig,
    Trajectory,
    cumulative_regret,
    detect_convergence,
    run_closed_loop,
    run_mirror_descent,
)
from .validation import check_left_stochastic, check_simplex, simplex_basis

__version__ = "1.0.0"

__all__ = [
    "AffineLatency",
    "CondensedQp",
    "ConfigError",
    "CriticalRegion",
    "CyclicGraphError",
    "DomainError",
    "ExplicitMpcRouter",
    "GameDynamics",
    "HorizonProblem",
    "LawReport",
    "LearnerConfig",
    "LineGraph",
    "ParallelNetwork",
    "PwaControlLaw",
    "QpSolution",
    "QuadraticCost",
    "RecedingHorizonRouter",
    "RegionBudgetError",
    "RegionNotFoundError",
    "RiccatiSequence",
    "RoadNetwork",
    "SimplexError",
    "SingularDynamicsError",
    "SolverError",
    "StochasticityError",
    "Trajectory",
    "aggregate_path_flows",
    "averaging_A_state",
    "check_left_stochastic",
    "check_simplex",
    "condense",
    "control_at",
    "cost_from_network",
    "cumulative_regret",
    "dare_sequence",
    "demand_balance_check",
    "detect_convergence",
    "enumerate_paths",
    "enumerate_regions",
    "equilibrium_flow",
    "equilibrium_support",
    "expected_path_flows",
    "export_regions",
    "latency_vector",
    "law_from_dict",
    "law_from_json",
    "law_to_dict",
    "line_graph",
    "lookup",
    "nash_equilibrium",
    "network_from_coefficients",
    "nilpotency_index",
    "path_probabilities",
    "polygon_area",
    "region_polygons",
    "riccati_recursion",
    "rollout_value",
    "rosenthal_potential",
    "run_closed_loop",
    "run_mirror_descent",
    "simplex_basis",
    "social_welfare",
    "solve_qp",
    "solve_qp_exhaustive",
    "steady_state_averaging_B",
    "step",
    "ternary_projection",
    "topological_order",
    "uniform_averaging",
    "value_function",
    "verify_law",
]
