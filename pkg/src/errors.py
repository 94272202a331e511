from __future__ import annotations

from typing import Any, Optional

__all__ = [
    "AttackError",
    "ConfigError",
    "DataError",
    "HarnessError",
    "LabError",
    "ParseError",
    "ShapeError",
    "UnsupportedOperationError",
    "EXIT_CONFIG_ERROR",
    "EXIT_DATA_ERROR",
    "EXIT_RUNTIME_FAILURE",
]

EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_RUNTIME_FAILURE = 4


class LabError(RuntimeError):
    def __init__(self, message: str, *, exit_code: int = EXIT_RUNTIME_FAILURE) -> None:
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": False,
            "error": self.message,
            "error_type": type(self).__name__,
            "exit_code": self.exit_code,
        }


class ConfigError(LabError):
    def __init__(self, message: str, *, diagnostics: Optional[list[dict[str, str]]] = None) -> None:
        super().__init__(message, exit_code=EXIT_CONFIG_ERROR)
        self.diagnostics = list(diagnostics or [])

    def to_dict(self) -> dict[str, Any]:
        payload = super().to_dict()
        payload["diagnostics"] = self.diagnostics
        return payload


class DataError(LabError):
    def __init__(self, message: str) -> None:
        super().__init__(message, exit_code=EXIT_DATA_ERROR)


class ParseError(DataError):
    def __init__(self, message: str, *, path: Optional[str] = None, line: Optional[int] = None) -> None:
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line

    def to_dict(self) -> dict[str, Any]:
        payload = super().to_dict()
        payload["path"] = self.path
        payload["line"] = self.line
        return payload


class ShapeError(LabError, ValueError):
    pass


class UnsupportedOperationError(LabError):
    pass


class AttackError(LabError, ValueError):
    pass


class HarnessError(LabError):
    pass
