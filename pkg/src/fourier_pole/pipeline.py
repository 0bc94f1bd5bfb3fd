"""End-to-end in-plane estimation: hovering views, rendering, stacking, scanning."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .config import PipelineConfig
from .errors import DegenerateImageError, PoleEstimationError
from .geometry import (CameraView, OrthographicIntrinsics, PinholeIntrinsics, SphericalPosition,
                       hover_frame)
from .mesh import TriangleMesh, generate_test_shape, load_obj
from .render import RenderConfig, SilhouetteImage, render_silhouette, sun_from_phase
from .spectral import (SymmetryCurve, angular_distance, disambiguate, estimate_in_plane_angle,
                       expand_pole_hypotheses, query_grid)
from .stack import StackImage, register_frames


@dataclass
class InPlaneResult:
    alpha_hat: float
    hypotheses: np.ndarray
    curve: SymmetryCurve
    stack: StackImage
    alpha_true: Optional[float] = None
    disambiguated: Optional[float] = None

    @property
    def error(self) -> Optional[float]:
        """Distance to the truth modulo a quarter turn, when the truth is known."""
        if self.alpha_true is None:
            return None
        return quarter_error(self.alpha_hat, self.alpha_true)


def build_mesh(cfg: PipelineConfig) -> TriangleMesh:
    s = cfg.shape
    if s.kind == "obj":
        return load_obj(s.obj_path)
    return generate_test_shape(s.kind, s.subdivisions, **s.params)


def longitudes(cfg: PipelineConfig) -> np.ndarray:
    """Camera longitudes in radians over ``[start, end)`` at the configured step."""
    c = cfg.camera
    count = int(np.ceil((c.lon_end_deg - c.lon_start_deg) / c.lon_step_deg - 1e-9))
    return np.radians(c.lon_start_deg + c.lon_step_deg * np.arange(count))


def make_view(cfg: PipelineConfig, mesh: TriangleMesh, lon: float) -> CameraView:
    c = cfg.camera
    n = c.resolution
    pos = SphericalPosition(c.distance, np.radians(c.lat_deg), lon)
    frame = hover_frame(pos, np.radians(c.pole_angle_deg))
    # pixels per body unit so the bounding sphere spans `extent` of the image
    scale = c.extent * n / (2.0 * mesh.bounding_radius())
    if c.projection == "orthographic":
        intr = OrthographicIntrinsics(scale, n // 2, n // 2)
    else:
        f = scale * c.distance
        intr = PinholeIntrinsics(f, f, n // 2, n // 2)
    return CameraView(pos, frame, intr, n)


def render_config(cfg: PipelineConfig) -> RenderConfig:
    r = cfg.render
    return RenderConfig(r.shadow_epsilon, r.supersample, r.centroid_weighting)


def render_frames(cfg: PipelineConfig, mesh: TriangleMesh = None,
                  threads: int = 1, mode: str = "observable") -> Iterator[SilhouetteImage]:
    """Yield the frames of the configured hovering sequence in longitude order.

    Frames are rendered in blocks of ``threads`` so memory stays bounded at
    high resolution; the output does not depend on ``threads``.
    """
    mesh = build_mesh(cfg) if mesh is None else mesh
    rcfg = render_config(cfg)
    phase = np.radians(cfg.sun.phase_deg)
    azimuth = np.radians(cfg.sun.azimuth_deg)

    def one(idx_lon):
        idx, lon = idx_lon
        view = make_view(cfg, mesh, lon)
        sun = sun_from_phase(view, phase, azimuth)
        try:
            img = render_silhouette(mesh, view, sun, rcfg, mode)
        except PoleEstimationError as exc:
            raise type(exc)(f"frame {idx}: {exc}") from exc
        img.extra["index"] = idx
        return img

    jobs = list(enumerate(longitudes(cfg)))
    if threads <= 1:
        for job in jobs:
            yield one(job)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(jobs), 4 * threads):
            yield from pool.map(one, jobs[start:start + 4 * threads])


def accumulate_stack(frames, mode: str, weighting: str = "binary") -> StackImage:
    """Register and co-add a stream of frames without holding them all in memory."""
    total = None
    lons = []
    count = 0
    for idx, f in enumerate(frames):
        try:
            reg = register_frames([f], mode, weighting)[0]
        except DegenerateImageError as exc:
            raise DegenerateImageError(f"frame {f.extra.get('index', idx)}: {exc}") from exc
        if total is None:
            total = np.zeros(reg.pixels.shape, dtype=np.int64)
        elif reg.pixels.shape != total.shape:
            raise ValueError("frames differ in size")
        total += reg.pixels
        lons.append(f.lon)
        count += 1
    if total is None:
        raise ValueError("no frames to co-add")
    return StackImage(total, count, mode, lons)


def estimate_from_stack(stack: StackImage, cfg: PipelineConfig,
                        alpha_true: Optional[float] = None) -> InPlaneResult:
    grid = query_grid(np.radians(cfg.grid_step_deg))
    alpha_hat, curve = estimate_in_plane_angle(stack, tau=cfg.tau_px, grid=grid)
    hyp = expand_pole_hypotheses(alpha_hat)
    pick = None
    if cfg.hint_deg is not None:
        pick = disambiguate(hyp, np.radians(cfg.hint_deg))
    return InPlaneResult(alpha_hat, hyp, curve, stack, alpha_true, pick)


def run_in_plane(cfg: PipelineConfig, threads: int = 1, mode: Optional[str] = None,
                 mesh: TriangleMesh = None) -> InPlaneResult:
    """Render the configured sequence, stack it and estimate the in-plane angle."""
    mesh = build_mesh(cfg) if mesh is None else mesh
    mode = cfg.registration if mode is None else mode
    stack = accumulate_stack(render_frames(cfg, mesh, threads), mode,
                             cfg.render.centroid_weighting)
    alpha_true = np.radians(cfg.camera.pole_angle_deg) % (2 * np.pi)
    return estimate_from_stack(stack, cfg, alpha_true)


def quarter_error(alpha_hat: float, alpha_true: float) -> float:
    """Angular distance between two angles after folding both to a quarter turn."""
    return float(angular_distance(4 * alpha_hat, 4 * alpha_true) / 4)
