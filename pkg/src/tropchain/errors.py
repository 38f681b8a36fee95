from __future__ import annotations


class ChainError(ValueError):
    """Base class for every structured error raised by the library.

    ``code`` is a short machine-readable identifier that the CLI copies
    into its JSON error reports.
    """

    code = "error"

    def __init__(self, message: str, *, path: str | None = None):
        super().__init__(message)
        self.path = path

    def to_json(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.path is not None:
            out["path"] = self.path
        return out


class MalformedInput(ChainError):
    code = "malformed-input"


class UnsupportedCoordinate(ChainError):
    code = "unsupported-coordinate"


class PreconditionError(ChainError):
    code = "precondition"


class OracleUnavailable(ChainError):
    code = "oracle-unavailable"
