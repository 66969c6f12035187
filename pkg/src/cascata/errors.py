"""Exception types shared across the package."""


class CascataError(Exception):
    """Base class for all errors raised by this package."""


class ArityMismatchError(CascataError):
    def __init__(self, expected, actual, where=""):
        self.expected = expected
        self.actual = actual
        suffix = f" in {where}" if where else ""
        super().__init__(f"arity mismatch{suffix}: expected {expected}, got {actual}")


class UnknownLetterError(CascataError):
    def __init__(self, letter, position=None, where=""):
        self.letter = letter
        self.position = position
        at = f" at position {position}" if position is not None else ""
        suffix = f" in {where}" if where else ""
        super().__init__(f"unknown letter {letter!r}{at}{suffix}")


class EmptyInputError(CascataError):
    """Automaton output on the empty string is undefined; callers must pass
    at least one letter."""

    def __init__(self, where="automaton run"):
        super().__init__(f"{where} requires a non-empty string")


class CapExceededError(CascataError):
    def __init__(self, what, size, cap):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"{what} exceeds cap: {size} > {cap}")


class SpecFileError(CascataError):
    def __init__(self, message, field=None):
        self.field = field
        prefix = f"[{field}] " if field else ""
        super().__init__(prefix + message)
