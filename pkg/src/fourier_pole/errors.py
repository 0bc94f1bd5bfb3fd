"""Exception types raised across the package.

Each carries the CLI exit code it maps to, so the command layer can turn any
library failure into the documented process status without a lookup table.
"""


class PoleEstimationError(Exception):
    """Base class for all package errors."""

    exit_code = 4


class ConfigError(PoleEstimationError, ValueError):
    """Invalid or unknown configuration value."""

    exit_code = 2


class DegenerateGeometryError(PoleEstimationError, ValueError):
    """Geometry makes the requested quantity undefined or unobservable."""

    exit_code = 4


class DegenerateImageError(PoleEstimationError, ValueError):
    """Image content is constant or empty where variation is required."""

    exit_code = 4


class FieldOfViewError(PoleEstimationError):
    """The body is not fully contained in the camera field of view."""

    exit_code = 2


class MeshError(PoleEstimationError, ValueError):
    """Malformed mesh input."""

    exit_code = 3


class ObjParseError(MeshError):
    pass


class EmptyMeshError(MeshError):
    pass


class InvalidIndexError(MeshError):
    pass
