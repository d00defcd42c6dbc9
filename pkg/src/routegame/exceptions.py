"""Exception hierarchy shared across the package.

Grouped by how the command line maps them to exit codes: configuration
problems (exit 2), domain violations in otherwise well-formed input
(exit 3), and solver failures (exit 4).
"""


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


class DomainError(ValueError):
    """Input is structurally valid but violates a mathematical precondition."""


class SimplexError(DomainError):
    """Vector is not a probability allocation within tolerance."""


class StochasticityError(DomainError):
    """Matrix is not left stochastic within tolerance."""


class CyclicGraphError(DomainError):
    """Operation requires an acyclic road network."""


class SingularDynamicsError(DomainError):
    """Requested closed form does not exist for these dynamics parameters."""


class SolverError(RuntimeError):
    """Numerical solve failed or exceeded its iteration budget."""


class RegionNotFoundError(SolverError):
    """No stored critical region contains the queried state."""

    def __init__(self, x, tol):
        self.x = x
        self.tol = tol
        super().__init__(f"no critical region contains {x} (tol={tol:g})")


class RegionBudgetError(SolverError):
    """Critical-region exploration exceeded the region budget."""
