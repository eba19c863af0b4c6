"""
Error hierarchy shared by the services and the command-line front end
"""

from typing import Any, Dict, Optional


class WeylabError(Exception):
    """Base class for every library error"""

    code = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Structured form written to stderr by the CLI"""
        payload: Dict[str, Any] = {"error": self.code, "message": self.message}
        if self.details:
            payload["details"] = self.details
        return payload


class InvalidTypeError(WeylabError):
    code = "invalid-type"


class ParseError(WeylabError):
    code = "parse-error"


class ContractError(WeylabError):
    code = "contract"


class CapExceededError(WeylabError):
    """Bounded enumeration refused to grow past the entry cap"""

    code = "cap-exceeded"

    def __init__(self, what: str, required: int, cap: int):
        super().__init__(
            f"{what} needs {required} entries, cap is {cap}",
            {"required": required, "cap": cap},
        )
        self.required = required
        self.cap = cap


class NotACharacterError(WeylabError):
    code = "not-a-character"


class CorruptedCharacterError(WeylabError):
    code = "corrupted-character"


class InvalidAutomorphismError(WeylabError):
    code = "invalid-automorphism"


class UnknownFormError(WeylabError):
    code = "unknown-form"


class FixtureNotFoundError(WeylabError):
    code = "fixture-not-found"


class VerificationError(WeylabError):
    code = "verification"


class InternalError(WeylabError):
    """Unexpected failure outside the error taxonomy"""

    code = "internal"
