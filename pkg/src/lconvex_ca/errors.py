"""Exception types shared by the package."""


class LConvexError(Exception):
    """Base class for every error raised on purpose by this package."""


class InvalidInputError(LConvexError, ValueError):
    """An operation was called outside its precondition."""


class PictureFormatError(LConvexError, ValueError):
    """A picture file could not be parsed.

    ``line`` and ``column`` are 1-based and point at the offending
    character when one can be identified.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class GenerationError(LConvexError, RuntimeError):
    """A random generator ran out of its retry budget."""


class RefusalError(LConvexError, ValueError):
    """A request exceeds a documented size limit."""
