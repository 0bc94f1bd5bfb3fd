"""Reference frames, camera models and the pole-projection angle convention.

Vectors are plain ``numpy`` arrays of shape ``(3,)``. Angles are radians.

Image coordinates follow the usual raster layout: ``u`` grows to the right
along the camera ``i`` axis, ``v`` grows downward along ``j``, and the
boresight ``k`` points into the scene. The pixel in row ``m``, column ``n``
has its center at ``(u, v) = (n, m)``.

The in-plane pole angle ``alpha`` is measured from image-up (``-v``) toward
``+u``::

    alpha = atan2(omega . i, -(omega . j))  (mod 2 pi)

so a pole pointing straight up the image has ``alpha = 0`` and one pointing
along ``+u`` has ``alpha = pi / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateGeometryError

TWO_PI = 2.0 * np.pi
_ORTHO_TOL = 1e-9


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0 or not np.isfinite(n):
        raise DegenerateGeometryError("cannot normalize a zero or non-finite vector")
    return v / n


def wrap_2pi(angle):
    """Reduce an angle (or array of angles) to ``[0, 2 pi)``."""
    a = np.mod(angle, TWO_PI)
    # np.mod returns exactly 2 pi for tiny negative inputs
    a = np.where(a >= TWO_PI, 0.0, a)
    return float(a) if a.ndim == 0 else a


@dataclass(frozen=True)
class SphericalPosition:
    """Camera position as distance, latitude and longitude (radians)."""

    r: float
    lat: float
    lon: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"distance must be positive, got {self.r}")
        if not -np.pi / 2 - 1e-12 <= self.lat <= np.pi / 2 + 1e-12:
            raise ValueError(f"latitude {self.lat} outside [-pi/2, pi/2]")
        object.__setattr__(self, "lon", float(wrap_2pi(self.lon)))


def spherical_to_cartesian(pos: SphericalPosition) -> np.ndarray:
    cl = np.cos(pos.lat)
    return pos.r * np.array([cl * np.cos(pos.lon), cl * np.sin(pos.lon), np.sin(pos.lat)])


@dataclass(frozen=True)
class CameraFrame:
    """Camera axes expressed in the body frame.

    ``i`` is image-right, ``j`` image-down, ``k`` the boresight. The frame must
    be orthonormal and right-handed.
    """

    i: np.ndarray
    j: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        for name in ("i", "j", "k"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))
        m = self.matrix
        if not np.allclose(m.T @ m, np.eye(3), atol=_ORTHO_TOL, rtol=0):
            raise DegenerateGeometryError("camera axes are not orthonormal")
        if not np.allclose(np.cross(self.i, self.j), self.k, atol=_ORTHO_TOL, rtol=0):
            raise DegenerateGeometryError("camera axes are not right-handed")

    @property
    def matrix(self) -> np.ndarray:
        """Columns ``[i j k]``: rotates camera-frame vectors into the body frame."""
        return np.column_stack([self.i, self.j, self.k])

    @classmethod
    def from_matrix(cls, m) -> "CameraFrame":
        m = np.asarray(m, dtype=float)
        return cls(m[:, 0], m[:, 1], m[:, 2])

    def rolled(self, angle: float) -> "CameraFrame":
        """Rotate the image axes about the boresight.

        A body direction that projects at in-plane angle ``a`` in this frame
        projects at ``a + angle`` in the returned frame.
        """
        c, s = np.cos(angle), np.sin(angle)
        return CameraFrame(c * self.i - s * self.j, s * self.i + c * self.j, self.k)

    def rotated(self, rot: np.ndarray) -> "CameraFrame":
        """Apply a body-frame rotation matrix to all three axes."""
        return CameraFrame(rot @ self.i, rot @ self.j, rot @ self.k)


def look_at_frame(camera_pos, target, up_hint) -> CameraFrame:
    """Frame whose boresight points from ``camera_pos`` toward ``target``.

    ``up_hint`` appears pointing up the image (toward ``-v``).
    """
    k = np.asarray(target, dtype=float) - np.asarray(camera_pos, dtype=float)
    if np.linalg.norm(k) == 0.0:
        raise DegenerateGeometryError("camera position coincides with target")
    k = k / np.linalg.norm(k)
    cross = np.cross(k, np.asarray(up_hint, dtype=float))
    if np.linalg.norm(cross) < 1e-9:
        raise DegenerateGeometryError(
            "up_hint is parallel to the boresight; supply a different hint")
    i = cross / np.linalg.norm(cross)
    j = np.cross(k, i)
    return CameraFrame(i, j, k)


def hover_frame(pos: SphericalPosition, pole_angle: float = 0.0) -> CameraFrame:
    """Frame of a camera at ``pos`` pointing at the body origin.

    The roll is chosen so that the body ``+z`` axis projects at in-plane
    angle ``pole_angle``.
    """
    r = spherical_to_cartesian(pos)
    up = np.array([0.0, 0.0, 1.0])
    if abs(abs(pos.lat) - np.pi / 2) < 1e-9:
        # over a pole the body z axis is the boresight; anchor on +x instead
        up = np.array([1.0, 0.0, 0.0])
    return look_at_frame(r, np.zeros(3), up).rolled(pole_angle)


@dataclass(frozen=True)
class PinholeIntrinsics:
    fu: float
    fv: float
    cu: float
    cv: float

    def __post_init__(self):
        if not (self.fu > 0 and self.fv > 0):
            raise ValueError("focal lengths must be positive")

    @property
    def K(self) -> np.ndarray:
        return np.array([[self.fu, 0.0, self.cu], [0.0, self.fv, self.cv], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class OrthographicIntrinsics:
    """Affine camera: ``scale`` pixels per body unit about ``(cu, cv)``."""

    scale: float
    cu: float
    cv: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("orthographic scale must be positive")


Intrinsics = Union[PinholeIntrinsics, OrthographicIntrinsics]


@dataclass(frozen=True)
class CameraView:
    position: SphericalPosition
    frame: CameraFrame
    intrinsics: Intrinsics
    resolution: int

    def __post_init__(self):
        if self.resolution < 8:
            raise ValueError("resolution must be at least 8")
        n = self.resolution
        if not (0 <= self.intrinsics.cu < n and 0 <= self.intrinsics.cv < n):
            raise ValueError("principal point outside the image")

    @property
    def r_body(self) -> np.ndarray:
        return spherical_to_cartesian(self.position)


def camera_matrix(view: CameraView) -> np.ndarray:
    """3x4 projection matrix mapping homogeneous body points to pixels."""
    rot = view.frame.matrix.T  # body -> camera
    r = view.r_body
    intr = view.intrinsics
    if isinstance(intr, PinholeIntrinsics):
        return intr.K @ np.hstack([rot, (-rot @ r)[:, None]])
    s = intr.scale
    c = np.zeros((3, 4))
    c[0, :3] = s * rot[0]
    c[0, 3] = -s * rot[0] @ r + intr.cu
    c[1, :3] = s * rot[1]
    c[1, 3] = -s * rot[1] @ r + intr.cv
    c[2, 3] = 1.0
    return c


def is_affine(c: np.ndarray) -> bool:
    return bool(np.all(c[2, :3] == 0.0))


def project_point(c: np.ndarray, p) -> np.ndarray:
    """Project a body-frame point with camera matrix ``c``; returns ``(u, v)``."""
    h = c @ np.append(np.asarray(p, dtype=float), 1.0)
    if not is_affine(c) and not h[2] > 0:
        raise DegenerateGeometryError("point is not in front of the camera")
    return h[:2] / h[2]


def true_pole_projection_angle(omega, frame: CameraFrame) -> float:
    """In-plane angle of the projected pole, in ``[0, 2 pi)``."""
    omega = np.asarray(omega, dtype=float)
    wi, wj = omega @ frame.i, omega @ frame.j
    if np.hypot(wi, wj) < 1e-9:
        raise DegenerateGeometryError("pole is along the boresight; in-plane angle undefined")
    return float(wrap_2pi(np.arctan2(wi, -wj)))
