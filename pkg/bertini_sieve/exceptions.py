"""
    bertini_sieve.exceptions
    ~~~~~~~~~~~~~~~~~~~~~~~~

    Error hierarchy. ``exit_code`` is what the command line exits with.
"""


class BertiniError(Exception):
    exit_code = 1


class ConfigError(BertiniError):
    exit_code = 2


class ParseError(ConfigError, ValueError):
    """Syntax error in a polynomial string; ``position`` is the offending offset."""

    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        if position is not None:
            message = f'{message} at position {position}'
        super().__init__(message)


class BudgetExceeded(BertiniError):
    exit_code = 3


class PreconditionViolated(BertiniError, ValueError):
    exit_code = 4


class FieldMismatch(PreconditionViolated):
    pass


class SingularPoint(PreconditionViolated):
    pass


class GeneralPositionError(PreconditionViolated):
    pass


class InternalError(BertiniError):
    pass
