"""Exception types shared across the toolkit."""


class VacuumError(ValueError):
    """Bernoulli base became non-positive; the state would cavitate."""


class SearchError(RuntimeError):
    """A bracketed root/tangency search failed; carries the scanned interval."""

    def __init__(self, msg, interval=None):
        super().__init__(msg if interval is None else f"{msg} (scanned {interval})")
        self.interval = interval


class DetachedError(ValueError):
    """No shock root exists for the requested wedge angle."""


class UnsupportedConfigurationError(ValueError):
    """Configuration outside the solvable regime (subsonic local state, etc.)."""


class NearSonicError(UnsupportedConfigurationError):
    """Wedge angle too close to the sonic transition to build a reliable domain."""


class NonConvergenceError(RuntimeError):
    """Iteration cap reached; carries the diagnostic trail."""

    def __init__(self, msg, diagnostics=None, history=None):
        super().__init__(msg)
        self.diagnostics = diagnostics
        self.history = history or []


class RayUpdateError(RuntimeError):
    """Shock vertex update could not locate the level set along its ray."""
