"""Exception hierarchy shared by the model and the command line."""


class ModelError(ValueError):
    """Base class for errors raised by the propagation model."""


class DegenerateGeometry(ModelError):
    """Tx-Rx distance does not exceed |h_t - h_r|."""


class OutOfSupport(ModelError):
    """Offset AoA lies outside the cluster support region."""


class NonPhysical(ModelError):
    """Receiver-side ray would run parallel to or away from the reflector."""


class InvalidMaterial(ModelError):
    """Material parameters outside their physical range."""


class TotalAbsorption(ModelError):
    """Reflection coefficient is zero, so the ray carries no power."""


class ZeroPattern(ModelError):
    """Directive scattering pattern is zero for the ray direction."""


class EmptySupport(ModelError):
    """Support region contains no offset AoA."""


class EmptyCluster(ModelError):
    """Binned cluster has no MPC above the receiver sensitivity."""


class ClusterOverlap(ModelError):
    """Two clusters share part of the global AoA axis."""

    def __init__(self, first: str, second: str):
        self.pair = (first, second)
        super().__init__(f"Clusters {first!r} and {second!r} overlap in angle")


class ScenarioError(ValueError):
    """Base class for scenario document problems."""


class ParseError(ScenarioError):
    """Scenario document is not well-formed."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field {field!r}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")


class ValidationError(ScenarioError):
    """Scenario document violates one or more model invariants."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("Invalid scenario:\n" + "\n".join(f"- {p}" for p in self.problems))


class MissingReference(LookupError):
    """Reference table has no entry for a simulated cluster."""
