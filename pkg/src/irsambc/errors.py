"""Exception types shared across the simulator."""


class SimulatorError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(SimulatorError):
    """An argument violates a documented precondition."""


class ShapeError(InvalidInputError):
    """Array dimensions do not match the expected layout."""


class GeometryError(InvalidInputError):
    """Node geometry is unusable (non-positive distance, bad coordinates)."""


class StatisticsError(InvalidInputError):
    """Energy or covariance statistics violate positivity requirements."""


class StateError(SimulatorError):
    """An operation was called before the state it needs exists."""


class NumericalError(SimulatorError):
    """An iterative numerical routine failed to converge."""


class DefinitenessError(NumericalError):
    """A matrix required to be positive definite is not."""


class DegenerateGeometryError(SimulatorError):
    """A channel configuration admits no meaningful solution."""


class SchemaError(SimulatorError):
    """A data file is missing required columns or keys."""
