"""Exception hierarchy."""


class EquilocError(Exception):
    """Base class for all package errors."""


class ADOrderError(EquilocError):
    """A derivative was requested beyond the available jet order."""


class DomainError(EquilocError):
    """A point lies outside a chart domain."""


class SingularityError(EquilocError):
    """A point lies on a coordinate-singular locus of a chart."""


class ScenarioError(EquilocError):
    """Scenario definition or validation failure."""


class ScenarioInconsistencyError(ScenarioError):
    """Numerically located zeros disagree with the declared fixed components."""


class PreconditionError(EquilocError):
    """An operation was called outside its hypotheses."""


class DegenerateComponentError(EquilocError):
    """The normal moment matrix of a fixed component is not invertible."""


class IntegrationError(EquilocError):
    """Quadrature refinement failed to converge."""


class ExpressionError(ScenarioError):
    """An expression string does not parse under the scenario grammar."""
