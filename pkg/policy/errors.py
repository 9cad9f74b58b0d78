"""
Errors raised while binding graphs to policy objects
"""
from typing import Optional

from rdf.errors import DToUError, RelativeIriError, TurtleSyntaxError, UndefinedPrefixError


class PolicyError(DToUError):
    """Base class for policy-model and reasoning errors"""


class StructuralError(PolicyError):
    """A policy node is missing a field, has too many values, or has a value of the wrong kind"""

    def __init__(self, node: object, field: str, message: str):
        self.node = node
        self.field = field
        super().__init__(f"{node}: {field}: {message}")


class DanglingReferenceError(StructuralError):
    """A reference points at a node that is not part of the same policy"""

    def __init__(self, node: object, field: str, target: object, scope: Optional[str] = None):
        self.target = target
        where = f" in {scope}" if scope else ""
        super().__init__(node, field, f"reference to {target} does not resolve{where}")


class DerivationError(PolicyError):
    """An output cannot be derived, e.g. one of its from-ports has no data policy"""

    def __init__(self, port: str, message: str):
        self.port = port
        super().__init__(f"port {port!r}: {message}")


__all__ = [
    "DToUError",
    "DanglingReferenceError",
    "DerivationError",
    "PolicyError",
    "RelativeIriError",
    "StructuralError",
    "TurtleSyntaxError",
    "UndefinedPrefixError",
]
