"""Exception hierarchy."""


class PointerLabError(Exception):
    """Base class for all library errors."""


class InvariantViolation(PointerLabError, ValueError):
    """A value breaks a documented physical or algebraic invariant.

    ``invariant`` names the broken condition so the CLI can report it.
    """

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        msg = f"invariant violated: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvalidStateError(InvariantViolation):
    pass


class InvalidOverlapError(InvariantViolation):
    pass


class UnsupportedPairError(PointerLabError, ValueError):
    """Two packets cannot be combined in closed form (width/mass/time mismatch)."""


class RegimeViolationError(PointerLabError, RuntimeError):
    """An operation was requested in a regime where it is not meaningful."""


class ConfigError(PointerLabError, ValueError):
    """Malformed run configuration (syntax, unknown key, bad literal)."""
