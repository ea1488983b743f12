"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ``ConfigError`` -> 2, ``DataError`` -> 3.
"""


class TweetinfoError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(TweetinfoError):
    """Invalid configuration: unknown names, out-of-range parameters, bad flags."""


class DataError(TweetinfoError):
    """Invalid input data (malformed files, inconsistent labels, bad features).

    ``line`` carries a 1-based line number when the error comes from parsing
    a line-oriented file, else None.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
