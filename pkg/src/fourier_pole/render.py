"""Ray-cast silhouette rendering of a triangle mesh under collimated sunlight.

A pixel is occupied when at least one of its sample rays hits the mesh and,
in ``"observable"`` mode, the front-most hit is also lit: it faces the sun
and a ray from the hit (nudged off the surface along its normal) toward the
sun meets no triangle.

Camera rays are resolved by testing sample points against projected
triangles with a depth buffer, which is exact for both orthographic and
pinhole cameras. Shadow rays are all parallel, so candidate occluders are
looked up in a uniform 2D bin grid laid out in the plane normal to the sun.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numba
import numpy as np

from .errors import DegenerateImageError, FieldOfViewError
from .geometry import (CameraView, OrthographicIntrinsics, camera_matrix, project_point,
                       true_pole_projection_angle, unit)
from .mesh import TriangleMesh

_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class SunState:
    """Unit vector from the body toward the sun (body frame); light is collimated."""

    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "direction", unit(self.direction))


@dataclass(frozen=True)
class RenderConfig:
    shadow_epsilon: float = 1e-4
    supersample: int = 1
    centroid_weighting: str = "binary"

    def __post_init__(self):
        if not 0 < self.shadow_epsilon <= 1e-2:
            raise ValueError("shadow_epsilon must lie in (0, 1e-2]")
        if self.supersample < 1:
            raise ValueError("supersample must be >= 1")
        if self.centroid_weighting not in ("binary", "lambertian"):
            raise ValueError("centroid_weighting must be 'binary' or 'lambertian'")


@dataclass
class SilhouetteImage:
    """Boolean occupancy mask, row ``m`` = ``v`` (down), column ``n`` = ``u`` (right).

    ``com_uv`` is the projected body center of mass, when known. ``brightness``
    holds the mean Lambertian shading per pixel when the renderer produced it.
    """

    pixels: np.ndarray
    lon: float = 0.0
    lat: float = 0.0
    r: float = 1.0
    phase: float = 0.0
    com_uv: Optional[tuple] = None
    brightness: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("silhouette must be a square 2D array")
        self.pixels = p.astype(bool, copy=False)

    @property
    def n(self) -> int:
        return self.pixels.shape[0]

    def with_pixels(self, pixels, brightness=None, **extra) -> "SilhouetteImage":
        return SilhouetteImage(pixels, self.lon, self.lat, self.r, self.phase, self.com_uv,
                               brightness, {**self.extra, **extra})


def sun_from_phase(view: CameraView, phase: float, azimuth: float = np.pi / 2,
                   pole=(0.0, 0.0, 1.0)) -> SunState:
    """Sun at ``phase`` from the camera direction, offset by ``azimuth``.

    ``azimuth`` is measured in the image plane from the projected pole toward
    the side where it would appear at in-plane angle pi/2. It is tied to the
    pole rather than to the sensor axes, so rolling the camera does not move
    the sun. If the pole lies along the boresight the image axes are used.
    """
    to_cam = unit(view.r_body)
    f = view.frame
    pole = np.asarray(pole, dtype=float)
    up = pole - (pole @ f.k) * f.k
    if np.linalg.norm(up) < 1e-9:
        i0, j0 = f.i, f.j
    else:
        j0 = -unit(up)
        i0 = np.cross(j0, f.k)
    side = np.sin(azimuth) * i0 - np.cos(azimuth) * j0
    return SunState(np.cos(phase) * to_cam + np.sin(phase) * side)


def sun_phase_angle(view: CameraView, sun: SunState) -> float:
    c = float(np.clip(unit(view.r_body) @ sun.direction, -1.0, 1.0))
    return float(np.arccos(c))


def sample_offsets(supersample: int) -> np.ndarray:
    """Stratified ``k x k`` sub-pixel offsets plus the pixel center."""
    k = supersample
    if k == 1:
        return np.zeros((1, 2))
    g = (np.arange(k) + 0.5) / k - 0.5
    uu, vv = np.meshgrid(g, g)
    pts = np.column_stack([uu.ravel(), vv.ravel()])
    if k % 2 == 0:
        # keep the center so the result contains the center-sampled image
        pts = np.vstack([[0.0, 0.0], pts])
    return pts


# -- kernels -------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _rasterize(u, v, z, faces, n, offsets, perspective):
    s_count = offsets.shape[0]
    depth = np.full((n, n, s_count), np.inf)
    fid = np.full((n, n, s_count), -1, dtype=np.int64)
    omin_u = offsets[:, 0].min()
    omax_u = offsets[:, 0].max()
    omin_v = offsets[:, 1].min()
    omax_v = offsets[:, 1].max()
    for f in range(faces.shape[0]):
        a, b, c = faces[f, 0], faces[f, 1], faces[f, 2]
        ua, va, ub, vb, uc, vc = u[a], v[a], u[b], v[b], u[c], v[c]
        area = (ub - ua) * (vc - va) - (uc - ua) * (vb - va)
        if abs(area) < 1e-14:
            continue
        n0 = max(0, int(np.ceil(min(ua, ub, uc) - omax_u)))
        n1 = min(n - 1, int(np.floor(max(ua, ub, uc) - omin_u)))
        m0 = max(0, int(np.ceil(min(va, vb, vc) - omax_v)))
        m1 = min(n - 1, int(np.floor(max(va, vb, vc) - omin_v)))
        for m in range(m0, m1 + 1):
            for col in range(n0, n1 + 1):
                for s in range(s_count):
                    pu = col + offsets[s, 0]
                    pv = m + offsets[s, 1]
                    w0 = ((ub - pu) * (vc - pv) - (uc - pu) * (vb - pv)) / area
                    w1 = ((uc - pu) * (va - pv) - (ua - pu) * (vc - pv)) / area
                    w2 = 1.0 - w0 - w1
                    if w0 < -_EDGE_TOL or w1 < -_EDGE_TOL or w2 < -_EDGE_TOL:
                        continue
                    if perspective:
                        d = 1.0 / (w0 / z[a] + w1 / z[b] + w2 / z[c])
                    else:
                        d = w0 * z[a] + w1 * z[b] + w2 * z[c]
                    if d < depth[m, col, s]:
                        depth[m, col, s] = d
                        fid[m, col, s] = f
    return depth, fid


@numba.njit(cache=True, nogil=True)
def _build_grid(pa, pb, faces, grid):
    amin, amax = pa.min(), pa.max()
    bmin, bmax = pb.min(), pb.max()
    da = (amax - amin) / grid + 1e-12
    db = (bmax - bmin) / grid + 1e-12
    nf = faces.shape[0]
    lo = np.empty((nf, 4), dtype=np.int64)
    counts = np.zeros(grid * grid + 1, dtype=np.int64)
    for f in range(nf):
        a, b, c = faces[f, 0], faces[f, 1], faces[f, 2]
        i0 = min(grid - 1, int((min(pa[a], pa[b], pa[c]) - amin) / da))
        i1 = min(grid - 1, int((max(pa[a], pa[b], pa[c]) - amin) / da))
        j0 = min(grid - 1, int((min(pb[a], pb[b], pb[c]) - bmin) / db))
        j1 = min(grid - 1, int((max(pb[a], pb[b], pb[c]) - bmin) / db))
        lo[f, 0], lo[f, 1], lo[f, 2], lo[f, 3] = i0, i1, j0, j1
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                counts[i * grid + j + 1] += 1
    start = np.cumsum(counts)
    fill = start[:-1].copy()
    items = np.empty(start[-1], dtype=np.int64)
    for f in range(nf):
        for i in range(lo[f, 0], lo[f, 1] + 1):
            for j in range(lo[f, 2], lo[f, 3] + 1):
                cell = i * grid + j
                items[fill[cell]] = f
                fill[cell] += 1
    return start, items, amin, bmin, da, db


@numba.njit(cache=True, nogil=True)
def _occluded(qa, qb, qt, pa, pb, pt, faces, start, items, amin, bmin, da, db, grid):
    i = int((qa - amin) / da)
    j = int((qb - bmin) / db)
    if i < 0 or j < 0 or i >= grid or j >= grid:
        return False
    cell = i * grid + j
    for idx in range(start[cell], start[cell + 1]):
        f = items[idx]
        a, b, c = faces[f, 0], faces[f, 1], faces[f, 2]
        area = (pa[b] - pa[a]) * (pb[c] - pb[a]) - (pa[c] - pa[a]) * (pb[b] - pb[a])
        if abs(area) < 1e-14:
            continue
        w0 = ((pa[b] - qa) * (pb[c] - qb) - (pa[c] - qa) * (pb[b] - qb)) / area
        w1 = ((pa[c] - qa) * (pb[a] - qb) - (pa[a] - qa) * (pb[c] - qb)) / area
        w2 = 1.0 - w0 - w1
        if w0 < -_EDGE_TOL or w1 < -_EDGE_TOL or w2 < -_EDGE_TOL:
            continue
        if w0 * pt[a] + w1 * pt[b] + w2 * pt[c] > qt:
            return True
    return False


@numba.njit(cache=True, nogil=True)
def _shade(depth, fid, offsets, normals, verts, faces, rot, r, intr, perspective,
           sun, e1, e2, eps, observable, grid):
    n = depth.shape[0]
    s_count = depth.shape[2]
    occ = np.zeros((n, n), dtype=np.bool_)
    hit_any = np.zeros((n, n), dtype=np.bool_)
    bright = np.zeros((n, n))
    pa = verts @ e1
    pb = verts @ e2
    pt = verts @ sun
    start, items, amin, bmin, da, db = _build_grid(pa, pb, faces, grid)
    for m in range(n):
        for col in range(n):
            acc = 0.0
            for s in range(s_count):
                f = fid[m, col, s]
                if f < 0:
                    continue
                hit_any[m, col] = True
                pu = col + offsets[s, 0]
                pv = m + offsets[s, 1]
                d = depth[m, col, s]
                if perspective:
                    x = d * (pu - intr[2]) / intr[0]
                    y = d * (pv - intr[3]) / intr[1]
                else:
                    x = (pu - intr[2]) / intr[0]
                    y = (pv - intr[3]) / intr[1]
                p0 = r[0] + x * rot[0, 0] + y * rot[0, 1] + d * rot[0, 2]
                p1 = r[1] + x * rot[1, 0] + y * rot[1, 1] + d * rot[1, 2]
                p2 = r[2] + x * rot[2, 0] + y * rot[2, 1] + d * rot[2, 2]
                if perspective:
                    t0, t1, t2 = r[0] - p0, r[1] - p1, r[2] - p2
                else:
                    t0, t1, t2 = -rot[0, 2], -rot[1, 2], -rot[2, 2]
                n0, n1, n2 = normals[f, 0], normals[f, 1], normals[f, 2]
                if n0 * t0 + n1 * t1 + n2 * t2 < 0:
                    n0, n1, n2 = -n0, -n1, -n2
                cos_sun = n0 * sun[0] + n1 * sun[1] + n2 * sun[2]
                lit = cos_sun > 0.0
                if lit:
                    q0, q1, q2 = p0 + eps * n0, p1 + eps * n1, p2 + eps * n2
                    qa = q0 * e1[0] + q1 * e1[1] + q2 * e1[2]
                    qb = q0 * e2[0] + q1 * e2[1] + q2 * e2[2]
                    qt = q0 * sun[0] + q1 * sun[1] + q2 * sun[2]
                    lit = not _occluded(qa, qb, qt, pa, pb, pt, faces,
                                        start, items, amin, bmin, da, db, grid)
                if lit:
                    acc += cos_sun
                    occ[m, col] = True
                elif not observable:
                    occ[m, col] = True
            bright[m, col] = acc / s_count
    return occ, hit_any, bright


# -- public API ------------------------------------------------------------

def _face_normals(verts, faces):
    t = verts[faces]
    nrm = np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])
    length = np.linalg.norm(nrm, axis=1, keepdims=True)
    return nrm / np.where(length > 0, length, 1.0)


def _sun_basis(sun):
    helper = np.array([1.0, 0.0, 0.0]) if abs(sun[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = unit(np.cross(sun, helper))
    e2 = np.cross(sun, e1)
    return e1, e2


def render_silhouette(mesh: TriangleMesh, view: CameraView, sun: SunState,
                      cfg: RenderConfig = RenderConfig(), mode: str = "observable",
                      pole=(0.0, 0.0, 1.0)) -> SilhouetteImage:
    """Render the perfect or observable silhouette of ``mesh`` seen from ``view``.

    Raises :class:`FieldOfViewError` if the body is not strictly inside the
    image (any vertex projects off the image, or a border pixel is occupied).
    """
    if mode not in ("observable", "perfect"):
        raise ValueError("mode must be 'observable' or 'perfect'")
    n = view.resolution
    rot = view.frame.matrix
    r = view.r_body
    cam = (mesh.vertices - r) @ rot
    intr = view.intrinsics
    if isinstance(intr, OrthographicIntrinsics):
        perspective = False
        u = intr.cu + intr.scale * cam[:, 0]
        v = intr.cv + intr.scale * cam[:, 1]
        params = np.array([intr.scale, intr.scale, intr.cu, intr.cv])
    else:
        perspective = True
        if np.any(cam[:, 2] <= 1e-9):
            raise FieldOfViewError("part of the body lies behind the camera")
        u = intr.cu + intr.fu * cam[:, 0] / cam[:, 2]
        v = intr.cv + intr.fv * cam[:, 1] / cam[:, 2]
        params = np.array([intr.fu, intr.fv, intr.cu, intr.cv])
    if min(u.min(), v.min()) < -0.5 or max(u.max(), v.max()) > n - 0.5:
        raise FieldOfViewError("body extends beyond the image")

    offsets = sample_offsets(cfg.supersample)
    faces = np.ascontiguousarray(mesh.faces)
    depth, fid = _rasterize(u, v, cam[:, 2].copy(), faces, n, offsets, perspective)
    s = sun.direction
    e1, e2 = _sun_basis(s)
    grid = int(max(8, min(512, np.sqrt(len(faces)) * 1.5)))
    occ, hit_any, bright = _shade(depth, fid, offsets, _face_normals(mesh.vertices, faces),
                                  mesh.vertices, faces, np.ascontiguousarray(rot), r, params,
                                  perspective, s, e1, e2, cfg.shadow_epsilon,
                                  mode == "observable", grid)
    if hit_any[0].any() or hit_any[-1].any() or hit_any[:, 0].any() or hit_any[:, -1].any():
        raise FieldOfViewError("silhouette touches the image border")

    c = camera_matrix(view)
    com = tuple(float(x) for x in project_point(c, np.zeros(3)))
    extra = {}
    pole = np.asarray(pole, dtype=float)
    if np.hypot(pole @ view.frame.i, pole @ view.frame.j) > 1e-9:
        extra["alpha_true"] = true_pole_projection_angle(pole, view.frame)
    # shading is only kept when a centroid will be weighted by it
    bright = bright.astype(np.float32) if cfg.centroid_weighting == "lambertian" else None
    return SilhouetteImage(occ, view.position.lon, view.position.lat, view.position.r,
                           sun_phase_angle(view, sun), com, bright, extra)


def render_batch(mesh: TriangleMesh, views: Sequence[CameraView], suns: Sequence[SunState],
                 cfg: RenderConfig = RenderConfig(), mode: str = "observable",
                 threads: int = 1) -> list:
    """Render one frame per view. Output order and content do not depend on ``threads``."""
    jobs = list(zip(views, suns))

    def one(job):
        return render_silhouette(mesh, job[0], job[1], cfg, mode)

    if threads <= 1:
        return [one(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, jobs))


def brightness_centroid(img, weighting: str = "binary") -> tuple:
    """Intensity-weighted mean pixel-center coordinates ``(u, v)``.

    ``img`` is a :class:`SilhouetteImage` or a 2D array of weights. With
    ``weighting="lambertian"`` the renderer's shading image is used, which
    requires rendering with ``RenderConfig(centroid_weighting="lambertian")``.
    """
    if isinstance(img, SilhouetteImage):
        if weighting == "lambertian":
            if img.brightness is None:
                raise ValueError("silhouette carries no shading for lambertian weighting")
            w = img.brightness
        else:
            w = img.pixels
    else:
        w = img
    w = np.asarray(w, dtype=float)
    total = w.sum()
    if not total > 0:
        raise DegenerateImageError("cannot compute the centroid of an empty image")
    m_idx, n_idx = np.indices(w.shape)
    return float((w * n_idx).sum() / total), float((w * m_idx).sum() / total)
