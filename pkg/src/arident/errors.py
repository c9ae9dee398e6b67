"""Exception hierarchy.

Validation problems (bad specs, bad configs, nonstationary parameters) derive
from :class:`ValidationError`; failures that only show up once numbers are
crunched (singular normal equations, degenerate processes) derive from
:class:`NumericalError`. The CLI maps the two families to distinct exit codes.
"""


class AridentError(Exception):
    """Base class for all package errors."""


class ValidationError(AridentError, ValueError):
    """Input does not satisfy a documented precondition."""


class InvalidSpecError(ValidationError):
    pass


class NonstationaryError(ValidationError):
    pass


class InsufficientLengthError(ValidationError):
    pass


class UnsupportedScenarioError(ValidationError):
    pass


class ConfigError(ValidationError):
    """Malformed scenario configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None, scenario=None):
        self.field = field
        self.scenario = scenario
        prefix = ""
        if scenario is not None:
            prefix += f"[scenario.{scenario}] "
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)


class NumericalError(AridentError, ArithmeticError):
    """A computation could not be carried out on otherwise valid input."""


class DegenerateProcessError(NumericalError):
    pass


class NonIdentifiableError(NumericalError):
    """Normal equations are singular: the cost has infinitely many global minima."""


class BatchFailure(NumericalError):
    def __init__(self, batch_index, cause):
        self.batch_index = batch_index
        self.cause = cause
        super().__init__(f"batch {batch_index} failed: {cause}")
