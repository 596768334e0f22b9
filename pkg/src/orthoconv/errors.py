"""Exception hierarchy.

Every error carries a machine-readable ``code`` that the CLI serializes into
its reports.
"""


class OrthoconvError(Exception):
    code = "ERROR"


class DomainViolation(OrthoconvError, ValueError):
    """A point lies outside (or within tolerance of the boundary of) a domain."""

    code = "DOMAIN_VIOLATION"


class InvalidArgument(OrthoconvError, ValueError):
    code = "INVALID_ARGUMENT"


class UnsupportedPair(OrthoconvError):
    code = "UNSUPPORTED_PAIR"


class IllegalPrimeEnd(OrthoconvError, ValueError):
    code = "ILLEGAL_PRIME_END"


class DivergentDistance(OrthoconvError):
    """Minimization along a ray never found an increasing bracket."""

    code = "DIVERGENT_DISTANCE"

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ScenarioInvalid(OrthoconvError):
    code = "SCENARIO_INVALID"


class ScenarioConstructionFailed(OrthoconvError):
    code = "SCENARIO_CONSTRUCTION_FAILED"


class EstimationFailure(OrthoconvError):
    code = "ESTIMATION_FAILURE"


class ModelInconsistency(OrthoconvError):
    code = "MODEL_INCONSISTENCY"


class CorollaryViolation(OrthoconvError):
    code = "COROLLARY_VIOLATION"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(OrthoconvError, ValueError):
    code = "CONFIG_ERROR"

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
