"""Exception hierarchy shared across the toolkit."""


class LimitSurfaceError(Exception):
    """Base class for toolkit errors."""


class InvalidParameterError(LimitSurfaceError, ValueError):
    pass


class FacetDegeneracyError(LimitSurfaceError):
    """A support point has (near) zero velocity under the requested twist.

    The load is then indeterminate; draw it with ``sample_facet`` instead.
    """


class UndefinedDirectionError(LimitSurfaceError):
    """Gradient vanishes, so no velocity direction can be predicted."""


class ConvergenceError(LimitSurfaceError):
    """An iterative method hit its iteration cap or stalled.

    ``best`` holds the best iterate found, ``info`` any diagnostics.
    """

    def __init__(self, message, best=None, info=None):
        super().__init__(message)
        self.best = best
        self.info = info or {}


class InfeasibleStartError(LimitSurfaceError):
    pass
