"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`IqccError` so the CLI can
map domain failures to a single exit code.
"""


class IqccError(Exception):
    """Base class for all domain errors."""


class DimensionError(IqccError):
    """Operands defined over different qubit counts."""


class HermiticityError(IqccError):
    """An operator expected to be real/hermitian contains an odd-y word."""


class InvalidGeneratorError(IqccError):
    """A generator must be a purely imaginary Pauli word (odd y-count)."""


class CapacityError(IqccError):
    """A configured size limit (qubits, generators, term budget) was exceeded."""


class FcidumpError(IqccError):
    """Malformed FCIDUMP input."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class OptimizationError(IqccError):
    """The optimizer hit a non-finite objective value."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class IterationAbort(IqccError):
    """An iQCC run aborted mid-loop; carries the partial trajectory."""

    def __init__(self, message: str, records=None):
        super().__init__(message)
        self.records = records or []
