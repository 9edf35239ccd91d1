"""Exception hierarchy shared by all blockplan modules."""


class BlockplanError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(BlockplanError, ValueError):
    """Input violates a documented invariant (bad scene, bad flag, ...)."""


class SceneParseError(ValidationError):
    """Malformed scene / trial file."""


class InfeasibleError(ValidationError):
    """Trial cannot be solved (e.g. colour multisets of A and B differ)."""


class CapacityError(BlockplanError):
    """Sampler could not fit the requested blocks into the workspace."""


class PlanningError(BlockplanError):
    """Symbolic planner could not order the target structure."""


class SimulationError(BlockplanError):
    """Integrator produced a non-finite state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class OverConstrainedError(BlockplanError):
    """Perturbation sampler exhausted its rejection budget."""


class SingularFitError(BlockplanError):
    """Regression design matrix is rank deficient."""


class EmptyDatasetError(ValidationError):
    """No usable participants remain after cleaning."""
