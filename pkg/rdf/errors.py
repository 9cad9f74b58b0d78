"""
Errors raised while reading Turtle documents
"""
from typing import Optional


class DToUError(Exception):
    """Base class for every error raised by the engine"""


class TurtleSyntaxError(DToUError):
    """Document is not valid Turtle"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")


class UndefinedPrefixError(TurtleSyntaxError):
    """A prefixed name uses a prefix that was never declared"""


class RelativeIriError(TurtleSyntaxError):
    """A relative IRI appears in a document parsed without a base"""
