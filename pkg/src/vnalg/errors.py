"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class StructureMismatchError(ToolkitError):
    """Operands belong to different algebras or have incompatible shapes."""


class DomainError(ToolkitError):
    """An input violates a mathematical precondition."""


class NumericError(ToolkitError):
    """A numerical procedure failed (non-convergence, ill-conditioning)."""


class ResourceLimitError(ToolkitError):
    """A configured enumeration cap would be exceeded."""


class InconsistencyError(ToolkitError):
    """An internal guarantee failed; the input is invalid or there is a bug."""


class FragmentEscapeError(DomainError):
    """A map sends nodes of a finite fragment outside the fragment."""

    def __init__(self, message: str, nodes=()):
        super().__init__(message)
        self.nodes = tuple(nodes)
