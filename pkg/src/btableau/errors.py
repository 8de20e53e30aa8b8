"""Exception hierarchy shared by every module of the package."""


class TableauError(ValueError):
    """Base class for all errors raised by btableau."""


class FillLengthMismatch(TableauError):
    pass


class AllZeroFill(TableauError):
    pass


class MalformedShape(TableauError):
    pass


class InvalidGrid(TableauError):
    pass


class ParseError(TableauError):
    def __init__(self, message: str, position: int, line: int | None = None):
        self.position = position
        self.line = line
        where = f"position {position}" if line is None else f"line {line}, position {position}"
        super().__init__(f"{message} (at {where})")


class ResourceCap(TableauError):
    pass


class DomainError(TableauError):
    pass


class IndexOutOfRange(TableauError, IndexError):
    pass


class NotErgodic(TableauError):
    pass


class SolverFailure(TableauError):
    pass
