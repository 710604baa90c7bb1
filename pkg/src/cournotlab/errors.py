"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class CalibrationError(RuntimeError):
    """A reference equilibrium could not be located within the market bounds."""


class NoRealResponse(RuntimeError):
    """The extortion identity has no real solution for the given rival quantity."""

    def __init__(self, x_prev: float, k: float, message: str | None = None):
        self.x_prev = x_prev
        self.k = k
        super().__init__(message or f"no real response for x_prev={x_prev} at k={k}")


class OutOfBoundsResponse(RuntimeError):
    """The unclamped response falls outside the algorithm's quantity interval.

    Carries the raw root so callers can inspect or clamp it themselves.
    """

    def __init__(self, raw: float, bounds: tuple[float, float]):
        self.raw = raw
        self.bounds = bounds
        super().__init__(f"response {raw} outside algorithm bounds {bounds}")


class UnsupportedCycleLength(ValueError):
    """Cycle search is limited to short periods; the grid blows up beyond that."""


class RejectedDecision(ValueError):
    """A submitted quantity is outside the rival's interval; the round is not consumed."""


class SessionClosed(RuntimeError):
    """The session is finished or abandoned and accepts no further decisions."""


class SessionNotFound(KeyError):
    """No session with the given identifier exists."""


class RoundConflict(RuntimeError):
    """A submission carried a round number other than the next expected one.

    For an already-recorded round the existing record is attached so retries
    are idempotent.
    """

    def __init__(self, expected: int, existing=None):
        self.expected = expected
        self.existing = existing
        super().__init__(f"expected round {expected}")


class LogParseError(ValueError):
    """A session log line could not be parsed."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")
