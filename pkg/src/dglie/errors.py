"""Exception types shared across the library."""


class DglieError(Exception):
    """Base class for all library errors."""


class DegreeOutOfBounds(DglieError):
    """A graded object was declared outside the supported degree window."""


class InvalidComplex(DglieError):
    """The differential does not square to zero."""


class NotAChainMap(DglieError):
    """A map fails to commute with the differentials."""


class MalformedInput(DglieError):
    """Structure constants or document fields are degree-inconsistent."""


class CutoffTooLarge(DglieError):
    """A truncated construction would exceed the configured dimension bound."""


class OutOfWindow(DglieError):
    """A product or operation left the weight window of a truncated object."""


class IndexOutOfFiltration(DglieError):
    """A filtration level beyond the cutoff was requested."""


class TargetMismatch(DglieError):
    """Fiber product of surjections with different targets."""


class UnsupportedPresentation(DglieError):
    """Algebra presentation exceeds the configured degree/generator bounds."""
