"""Exception hierarchy shared by all capopt modules.

The CLI and HTTP service map these onto exit codes / status codes:
ValidationError -> 3 / 400, InfeasibleError -> 2 / 422, LimitError -> 4 / 503.
"""


class CapoptError(Exception):
    """Base class for all capopt errors."""


class ValidationError(CapoptError):
    """Bad input: parse failures, invariant violations, domain errors."""


class ParseError(ValidationError):
    """Input file could not be parsed; carries the offending location."""

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class InfeasibleError(CapoptError):
    """The design task cannot be satisfied; an expected designer outcome."""


class InfeasibleMaskError(InfeasibleError):
    """Load impedance meets or exceeds the mask target at some frequency."""

    def __init__(self, frequency: float, impedance_target: float, load_impedance: float):
        self.frequency = frequency
        self.impedance_target = impedance_target
        self.load_impedance = load_impedance
        super().__init__(
            f"mask point at {frequency:g} Hz is infeasible: load impedance "
            f"{load_impedance:g} ohm >= target {impedance_target:g} ohm"
        )


class NoPartsError(InfeasibleError):
    """Filtered library is empty while constraints are nonvacuous."""


class LimitError(CapoptError):
    """A configured resource limit was exceeded."""


class NodeLimitExceeded(LimitError):
    """Branch-and-bound node limit hit; carries the best incumbent found."""

    def __init__(self, message: str, best=None):
        self.best = best
        super().__init__(message)


class SearchSpaceExceeded(LimitError):
    """Placement enumeration space larger than the configured cap."""
