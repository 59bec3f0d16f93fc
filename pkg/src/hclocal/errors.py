"""Exception types shared across the package.

The CLI maps these onto exit codes: InputError -> 1, DataIOError -> 2,
InternalInvariantError -> 3.
"""


class InputError(ValueError):
    """Invalid argument or malformed user input (validation failure)."""


class TreeFormatError(InputError):
    """Syntax or label error in tree text; carries a byte offset when known."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class MatrixFormatError(InputError):
    """Bad magic, size mismatch, or truncation in the binary matrix format."""


class DegenerateInputError(InputError):
    """Input is structurally valid but numerically degenerate (e.g. sigma 0)."""


class DataIOError(OSError):
    """I/O or file-content failure while reading datasets or artifacts."""


class StaleMoveError(RuntimeError):
    """An interchange move was applied to a tree that changed since the move
    was generated."""


class InternalInvariantError(AssertionError):
    """A runtime self-check failed; indicates a bug, not bad input."""
