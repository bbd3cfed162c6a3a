class ConfigError(ValueError):
    """A parameter block violates a model invariant."""


class InstabilityError(RuntimeError):
    """Time integration produced an unphysical or non-finite state.

    ``suggested_dt`` carries a step size that should be stable, when one
    can be estimated.
    """

    def __init__(self, message, *, time=None, index=None, suggested_dt=None):
        super().__init__(message)
        self.time = time
        self.index = index
        self.suggested_dt = suggested_dt
