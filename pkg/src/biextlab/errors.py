"""Exception types shared across the package."""


class BiextlabError(Exception):
    """Base class for all library errors."""


class InfiniteGroup(BiextlabError):
    """An operation needs a finite group but was given one of positive free rank."""


class IllDefinedHom(BiextlabError):
    """A matrix does not respect the torsion relations of its source."""


class SizeGuardExceeded(BiextlabError):
    """A construction would exceed the configured size bound."""


class RouteMismatch(BiextlabError):
    """Two independent computations of the same invariant disagree."""


class BicomplexInvalid(BiextlabError):
    """Rows, columns or squares of a bicomplex violate the required identities."""


class BlockLabelsMissing(BiextlabError):
    """A total complex lacks the block labels needed to address its summands."""


class ParseError(BiextlabError):
    """Malformed input document."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class UnknownName(BiextlabError):
    """A declaration refers to a name that was never declared."""

    def __init__(self, name: str, line: int = 0):
        self.name = name
        self.line = line
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}unknown name {name!r}")
