"""
Error hierarchy shared by the library, the CLI and the HTTP service.

Every error carries a stable ``error_code`` (used in JSON error bodies) and the
HTTP status the service answers with.
"""


class BlockMassError(ValueError):
    """Base class for all blockmass errors"""

    error_code = "BLOCKMASS_ERROR"
    status_code = 400

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def as_dict(self) -> dict:
        return {"error_code": self.error_code, "message": self.message, **self.context}


class InvalidInputError(BlockMassError):
    error_code = "VALIDATION_ERROR"
    status_code = 422


class BaseMismatchError(BlockMassError):
    error_code = "BASE_MISMATCH"


class EnumerationCapError(BlockMassError):
    error_code = "CAP_EXCEEDED"


class KCapError(BlockMassError):
    error_code = "K_CAP_EXCEEDED"


class NotExpandableError(BlockMassError):
    """Rational function with den(0) = 0"""

    error_code = "NOT_EXPANDABLE"


class PoleError(BlockMassError):
    error_code = "POLE"


class SingularMatrixError(BlockMassError):
    error_code = "SINGULAR_MATRIX"
    status_code = 500
