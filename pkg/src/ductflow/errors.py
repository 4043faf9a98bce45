"""Exception hierarchy shared by the solver modules."""


class DuctflowError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(DuctflowError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class HyperbolicityError(DuctflowError):
    """p + pi(phi) <= 0: the stiffened-gas state is not hyperbolic."""


class InadmissibleStateError(DuctflowError):
    """A state violates one of its invariants.

    ``field`` names the offending component and ``index`` the cell (when known).
    """

    def __init__(self, message, field=None, index=None):
        if index is not None:
            message = f"cell {index}: {message}"
        super().__init__(message)
        self.field = field
        self.index = index


class NoRootError(DuctflowError):
    """The stationary invariants cannot be realised in the requested regime."""


class ResonanceError(DuctflowError):
    """An acoustic eigenvalue coincides with the stationary wave speed."""


class VacuumError(DuctflowError):
    """The wave curves of a Riemann problem do not intersect."""


class ConvergenceError(DuctflowError):
    """An iterative solve did not converge within its iteration budget."""


class TimeStepError(DuctflowError):
    """A cell collapsed during the moving-mesh update."""


class ConfigError(DuctflowError):
    """Invalid run configuration; ``problems`` lists every violation."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
