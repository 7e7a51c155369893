"""Exception taxonomy shared across the package.

Callers that need to branch on a refusal catch the specific class; everything
derives from PadicflowError so the CLI can map families to exit codes.
"""


class PadicflowError(Exception):
    """Base class for all library errors."""


class ConfigError(PadicflowError):
    """Invalid configuration: bad prime, bad precision, bad parameters."""


class UsageError(PadicflowError):
    """Operands do not fit together (prime/precision/shape mismatch)."""


class NonUnitError(PadicflowError):
    """A p-adic unit was required."""


class UnsupportedError(PadicflowError):
    """Deliberately outside the supported domain (e.g. Teichmuller at p = 2)."""


class PrecisionExhausted(PadicflowError):
    """Requested guard precision exceeds the configured cap, or an input
    was built with too few digits for the requested computation."""


class UncontrolledTruncation(PadicflowError):
    """Composition attempted without a certified truncation-error bound."""


class NotFlowable(PadicflowError):
    """Congruence level too small for a one-parameter interpolation."""


class NotRescalable(PadicflowError):
    """Rescaling preconditions fail; pass to a smaller disk or a
    finite-index subgroup first."""


class FlowInvariantError(PadicflowError):
    """A certified flow invariant failed: indicates a build bug, not bad input."""


class NotInvariantError(PadicflowError):
    """A generator mapped a point outside the point set."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegreeOverflow(PadicflowError):
    """Symbolic composition exceeded the configured degree bound."""


class ChartSingular(PadicflowError):
    """All chart denominators vanish to the working precision at a point."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetError(PadicflowError):
    """A configured size/time budget was exceeded."""


class NeedsQuadraticExtension(PadicflowError):
    """The requested eigenvalue lives in a quadratic extension of Q_p."""


class MapSpecError(UsageError):
    """Map-specification string failed to parse; carries the 0-based position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position
