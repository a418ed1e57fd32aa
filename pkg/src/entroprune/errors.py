"""Exception hierarchy shared by every entroprune module."""


class EntroPruneError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(EntroPruneError, ValueError):
    """Arguments violate an operation's preconditions."""


class ConfigurationError(EntroPruneError):
    """Unknown plugin, criterion, or malformed run configuration."""


class OracleTooLargeError(InvalidInputError):
    """Exhaustive enumeration would exceed the configured subset cap."""


class ParseError(InvalidInputError):
    """A CSV input could not be parsed.

    ``line`` and ``column`` are 1-based and may be ``None`` when the problem
    is not tied to a single cell (e.g. a length mismatch between files).
    """

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
