"""Exception hierarchy, grouped by the CLI exit code each class maps to."""


class ConfigError(Exception):
    """Bad configuration: unknown key, invalid value, missing section. Exit code 2."""


class DataError(Exception):
    """Bad input data: parse failures, lookup misses, dimension mismatches. Exit code 3."""


class NumericalGuardError(Exception):
    """A numerical guard tripped (unstable ratio, empty post-selection). Exit code 4."""


class CoefficientParseError(DataError):
    """Malformed coefficient table; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnstableDenominatorError(NumericalGuardError):
    """Duplicate-circuit denominator too close to zero for a stable ratio."""


class AllShotsDiscardedError(NumericalGuardError):
    """Post-selection removed every shot; caller decides the fallback."""
