"""Exception types shared across the package."""


class WeldmatError(Exception):
    """Base class for all weldmat errors."""


class UnreadableFile(WeldmatError):
    """File missing, unreadable, or not a supported raster format."""


class MalformedHeader(WeldmatError):
    """Raster file header inconsistent with its payload."""


class InvariantViolation(WeldmatError):
    """Decoded or constructed raster violates the invariants of its kind."""


class DimensionMismatch(WeldmatError):
    """Operands do not share the required shape."""


class LengthMismatch(WeldmatError):
    """Paired sequences differ in length."""


class EmptyDataset(WeldmatError):
    """Evaluation requested on an empty image list."""


class EmptyBoundary(WeldmatError):
    """Boundary map contains no boundary pixels."""


class ImageTooSmall(WeldmatError):
    """Image smaller than the minimum the operation supports."""


class NoKnownPixels(WeldmatError):
    """Trimap has no foreground or background constraints."""


class SolverDivergence(WeldmatError):
    """Iterative solve failed to reach the residual tolerance."""


class DegenerateCrop(WeldmatError):
    """Crop window collapsed below one pixel."""
