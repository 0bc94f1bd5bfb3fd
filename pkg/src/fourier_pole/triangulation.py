"""Pole triangulation from in-plane angle measurements taken in several views.

A measurement ``alpha`` in a view with image axes ``i`` (right) and ``j``
(down) says the pole projects onto the image plane along

    d = sin(alpha) i - cos(alpha) j,

so with ``rho`` the length of that projection

    omega . i =  rho sin(alpha)
    omega . j = -rho cos(alpha).

Stacking these rows gives an overdetermined linear system in ``omega``
("linear" solver). When ``rho`` is unknown each view still constrains
``omega`` to the plane spanned by ``d`` and the boresight, i.e.

    omega . (cos(alpha) i + sin(alpha) j) = 0,

and the unit pole is the null vector of the stacked rows ("nullspace"
solver). Either way the answer is normalized afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateGeometryError
from .geometry import CameraFrame

SOLVERS = ("linear", "nullspace")
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class InPlaneMeasurement:
    """Pole-projection angle ``alpha`` observed in camera ``frame``.

    ``projection_norm`` is the length of the pole's projection onto the image
    plane when it is known (it is in simulation); it sets the scale of the
    right-hand side of the linear solver.
    """

    alpha: float
    frame: CameraFrame
    weight: float = 1.0
    projection_norm: Optional[float] = None

    def __post_init__(self):
        if not (np.isfinite(self.weight) and self.weight > 0):
            raise ValueError("weight must be finite and positive")
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        if self.projection_norm is not None and not 0 <= self.projection_norm <= 1 + 1e-9:
            raise ValueError("projection_norm must lie in [0, 1]")

    @property
    def direction(self) -> np.ndarray:
        """Unit image-plane direction of the projected pole, in the body frame."""
        return np.sin(self.alpha) * self.frame.i - np.cos(self.alpha) * self.frame.j


@dataclass(frozen=True)
class PoleEstimate:
    omega_hat: np.ndarray
    residual_rms: float
    n_measurements: int
    method: str = "linear"
    rank_deficient: bool = False


def _rows(measurements, method):
    """Design matrix, right-hand side and row weights for one solver."""
    a = []
    b = []
    w = []
    for m in measurements:
        i, j = m.frame.i, m.frame.j
        ca, sa = np.cos(m.alpha), np.sin(m.alpha)
        if method == "linear":
            rho = 1.0 if m.projection_norm is None else m.projection_norm
            a += [i, j]
            b += [rho * sa, -rho * ca]
            w += [m.weight, m.weight]
        else:
            a.append(ca * i + sa * j)
            b.append(0.0)
            w.append(m.weight)
    return np.array(a), np.array(b), np.array(w)


def _geometry_rank(measurements) -> int:
    """Rank of the stacked image axes: 3 unless all boresights are parallel."""
    rows = np.array([v for m in measurements for v in (m.frame.i, m.frame.j)])
    s = np.linalg.svd(rows, compute_uv=False)
    return int((s > _RANK_TOL * s[0]).sum())


def triangulate(measurements: Sequence[InPlaneMeasurement], method: Optional[str] = None,
                allow_rank_deficient: bool = False) -> PoleEstimate:
    """Least-squares pole direction from two or more in-plane measurements.

    Parameters
    ----------
    measurements : sequence of InPlaneMeasurement
    method : {"linear", "nullspace"}, optional
        Default is "linear" when every measurement carries a
        ``projection_norm`` and "nullspace" otherwise. "linear" with missing
        norms uses unit norms.
    allow_rank_deficient : bool
        If the views leave the pole unobservable along one direction (all
        boresights parallel), return the normalized minimum-norm solution
        flagged ``rank_deficient`` instead of raising.

    Returns
    -------
    PoleEstimate
        ``omega_hat`` is unit length, signed to agree with the first
        measurement's projected direction.
    """
    measurements = list(measurements)
    if len(measurements) < 2:
        raise ValueError("need at least two measurements")
    if method is None:
        method = "linear" if all(m.projection_norm is not None for m in measurements) else "nullspace"
    if method not in SOLVERS:
        raise ValueError(f"unknown solver {method!r}")

    rank = _geometry_rank(measurements)
    if rank < 2 or (rank < 3 and not allow_rank_deficient):
        raise DegenerateGeometryError(
            f"design matrix has rank {rank}; the pole is unobservable from these views")

    a, b, w = _rows(measurements, method)
    sw = np.sqrt(w)
    aw, bw = a * sw[:, None], b * sw
    if method == "linear":
        x, *_ = np.linalg.lstsq(aw, bw, rcond=None)
        if np.linalg.norm(x) < 1e-15:
            raise DegenerateGeometryError("least-squares solution vanished")
    else:
        _, s, vt = np.linalg.svd(aw)
        x = vt[-1]
    omega = x / np.linalg.norm(x)
    if omega @ measurements[0].direction < 0:
        omega = -omega
    res = aw @ omega - bw
    return PoleEstimate(omega, float(np.sqrt(np.mean(res ** 2))), len(measurements), method,
                        rank < 3)


def boresight_displacement(f1: CameraFrame, f2: CameraFrame) -> float:
    return float(np.arccos(np.clip(f1.k @ f2.k, -1.0, 1.0)))


def pole_error(omega_hat, omega_true, fold_sign: bool = False) -> float:
    """Angle between two unit vectors; ``fold_sign`` ignores the overall sign."""
    a, b = np.asarray(omega_hat, dtype=float), np.asarray(omega_true, dtype=float)
    # atan2 form: same angle as arccos of the dot product, but accurate near 0 and pi
    e = float(np.arctan2(np.linalg.norm(np.cross(a, b)), a @ b))
    return min(e, np.pi - e) if fold_sign else e


def frame_from_boresight(k, roll: float) -> CameraFrame:
    """Camera frame with boresight ``k`` and image axes rolled by ``roll``."""
    k = np.asarray(k, dtype=float)
    k = k / np.linalg.norm(k)
    helper = np.eye(3)[np.argmin(np.abs(k))]
    i0 = np.cross(helper, k)
    i0 /= np.linalg.norm(i0)
    j0 = np.cross(k, i0)
    c, s = np.cos(roll), np.sin(roll)
    return CameraFrame(c * i0 - s * j0, s * i0 + c * j0, k)


def sample_unit_vector(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(3)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


def sample_random_frame(rng: np.random.Generator) -> CameraFrame:
    """Uniform boresight on the sphere with a uniform roll about it."""
    k = sample_unit_vector(rng)
    return frame_from_boresight(k, 2 * np.pi * rng.random())


def sample_angle_noise(rng: np.random.Generator, sigma: float, size=None):
    """Zero-mean normal noise with draws beyond 3 sigma rejected and redrawn."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if size is None:
        if sigma == 0:
            return 0.0
        while True:
            x = rng.standard_normal()
            if abs(x) <= 3.0:
                return float(sigma * x)
    x = rng.standard_normal(size)
    bad = np.abs(x) > 3.0
    while bad.any():
        x[bad] = rng.standard_normal(int(bad.sum()))
        bad = np.abs(x) > 3.0
    return sigma * x
