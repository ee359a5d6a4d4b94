"""Exception types shared across the package."""


class AmbushGameError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(AmbushGameError):
    """A JSON document does not match the expected schema.

    Carries the offending field name so command-line callers can report
    machine-readable diagnostics.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NoCutExists(AmbushGameError):
    """Source and sink are adjacent, so no vertex cut separates them."""


class UnsupportedCapacities(AmbushGameError):
    """Operation requires unit capacities on all internal vertices."""


class InvalidFlow(AmbushGameError):
    """Edge flows violate conservation or cannot be decomposed into paths."""


class MalformedProgram(AmbushGameError):
    """Linear program dimensions are inconsistent."""


class CertificationError(AmbushGameError):
    """A solver returned Optimal but the primal/dual certificate fails."""


class InfeasibleGame(AmbushGameError):
    """The sink cannot be reached, so no traveler strategy exists."""


class InvalidStrategy(AmbushGameError):
    """A strategy references vertices or edges absent from the network."""


class NoPath(AmbushGameError):
    """No source-sink path exists."""


class InvalidReach(AmbushGameError):
    """Ambush reach radius must be strictly positive."""


class EmptyTerminalSet(AmbushGameError):
    """No sampled vertex lies close enough to a terminal edge."""


class NoSites(AmbushGameError):
    """No admissible ambush site remains after terminal exclusion."""
