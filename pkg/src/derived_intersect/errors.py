"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class EngineError(Exception):
    code = 1
    kind = "engine_error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "code": self.code, "message": str(self)}


class ParseError(EngineError, ValueError):
    code = 2
    kind = "parse_error"


class WindowError(EngineError):
    """Degree or Laurent window too small, or results changed on doubling."""

    code = 3
    kind = "window_instability"

    def __init__(self, message: str, suggested_window: int | None = None):
        super().__init__(message)
        self.suggested_window = suggested_window

    def to_dict(self) -> dict:
        out = super().to_dict()
        if self.suggested_window is not None:
            out["suggested_window"] = self.suggested_window
        return out


class ExactnessError(EngineError):
    code = 4
    kind = "exactness_failure"


class NotWellDefinedError(EngineError, ValueError):
    code = 5
    kind = "not_well_defined"


class ConsistencyError(EngineError):
    """Internal cross-check failed (two routes disagree, d^2 != 0, ...)."""

    code = 6
    kind = "internal_consistency"


class UnknownSuiteError(EngineError, KeyError):
    code = 7
    kind = "unknown_suite"

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return self.args[0] if self.args else ""
