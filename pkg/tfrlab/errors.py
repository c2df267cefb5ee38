"""Exception types. Codes are module-qualified (``core.off_grid_shift``) and map onto CLI exit codes."""

from .config import EXIT_NUMERICAL, EXIT_VALIDATION


class TfrlabError(Exception):
    exit_code = EXIT_VALIDATION

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    def to_record(self) -> dict:
        return {"code": self.code, "message": self.message}


class ValidationError(TfrlabError, ValueError):
    """Bad input or an unmet precondition."""

    exit_code = EXIT_VALIDATION


class NumericalError(TfrlabError, ArithmeticError):
    """A computation ran but could not deliver a trustworthy result."""

    exit_code = EXIT_NUMERICAL


def require(condition: bool, code: str, message: str) -> None:
    if not condition:
        raise ValidationError(code, message)
