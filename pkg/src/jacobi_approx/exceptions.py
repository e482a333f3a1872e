"""Semantic exception hierarchy shared by all modules."""


class JacobiApproxError(Exception):
    """Base class for all library errors."""


class ParameterError(JacobiApproxError, ValueError):
    """Weight/config parameters outside their admissible set (e.g. J_p)."""


class DomainError(JacobiApproxError, ValueError):
    """Evaluation requested outside the domain of definition."""


class PreconditionError(JacobiApproxError, ValueError):
    """A documented operation precondition was violated by the caller."""


class SolverStallError(JacobiApproxError, RuntimeError):
    """An iterative solver cycled or exhausted its iteration budget."""


class ConvergenceError(JacobiApproxError, RuntimeError):
    """A computation failed to reach its accuracy target."""
