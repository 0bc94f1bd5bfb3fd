"""Frame registration and co-addition of silhouettes into a stack image."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateImageError
from .render import SilhouetteImage, brightness_centroid

REGISTRATION_MODES = ("none", "known_center", "brightness_centroid")


@dataclass
class StackImage:
    """Integer co-added silhouette image."""

    pixels: np.ndarray
    frame_count: int
    registration: str = "none"
    lons: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.int64)

    @property
    def n(self) -> int:
        return self.pixels.shape[0]


def center_index(n: int) -> int:
    """Index of the image center pixel (also the DC pixel of a centered spectrum)."""
    return n // 2


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def circular_shift(img: np.ndarray, t_u: int, t_v: int) -> np.ndarray:
    """``out[m, n] = img[(m - t_v) % N, (n - t_u) % N]``."""
    return np.roll(np.asarray(img), (int(t_v), int(t_u)), axis=(0, 1))


def _pixels(frame):
    return frame.pixels if isinstance(frame, SilhouetteImage) else np.asarray(frame)


def register_frames(frames: Sequence[SilhouetteImage], mode: str = "none",
                    weighting: str = "binary") -> list:
    """Circularly shift each frame so its reference point sits on the center pixel.

    ``known_center`` uses the projected center of mass stored with the frame;
    ``brightness_centroid`` uses the frame's own intensity centroid. Shifts
    are rounded to whole pixels so frames stay boolean.
    """
    if mode not in REGISTRATION_MODES:
        raise ValueError(f"unknown registration mode {mode!r}")
    frames = list(frames)
    if not frames:
        raise ValueError("no frames to register")
    n = frames[0].n
    if any(f.n != n for f in frames):
        raise ValueError("frames differ in size")
    if mode == "none":
        return frames
    c = center_index(n)
    out = []
    for idx, f in enumerate(frames):
        if mode == "known_center":
            if f.com_uv is None:
                raise ValueError(f"frame {idx} has no known center")
            cu, cv = f.com_uv
        else:
            try:
                cu, cv = brightness_centroid(f, weighting)
            except DegenerateImageError as exc:
                raise DegenerateImageError(f"frame {idx}: {exc}") from exc
        tu, tv = _round_half_up(c - cu), _round_half_up(c - cv)
        shifted = circular_shift(f.pixels, tu, tv)
        bright = None if f.brightness is None else circular_shift(f.brightness, tu, tv)
        out.append(f.with_pixels(shifted, bright, shift_uv=(tu, tv)))
    return out


def co_add(frames: Sequence) -> StackImage:
    """Pixelwise sum of boolean frames (arrays or :class:`SilhouetteImage`)."""
    frames = list(frames)
    if not frames:
        raise ValueError("no frames to co-add")
    shape = _pixels(frames[0]).shape
    total = np.zeros(shape, dtype=np.int64)
    for f in frames:
        p = _pixels(f)
        if p.shape != shape:
            raise ValueError(f"frame size {p.shape} does not match {shape}")
        total += p.astype(bool)
    lons = [f.lon for f in frames if isinstance(f, SilhouetteImage)]
    return StackImage(total, len(frames), lons=lons)


def stack_frames(frames: Sequence[SilhouetteImage], mode: str = "none",
                 weighting: str = "binary") -> StackImage:
    st = co_add(register_frames(frames, mode, weighting))
    st.registration = mode
    return st


def symmetric_decomposition(stack, axis_angle: float):
    """Split a stack into the part mirror-symmetric about an axis and a residual.

    ``axis_angle`` is an in-plane angle through the center pixel. The image is
    rotated so the axis is vertical, the symmetric part is the pixelwise
    minimum of the image and its mirror, and it is rotated back. Nearest-
    neighbor resampling is lossy for off-grid angles, so the symmetric part is
    clipped to the original to keep ``symmetric + residual == stack`` exact.
    """
    from .spectral import reflect_vertical, rotate_image_nn

    img = stack.pixels if isinstance(stack, StackImage) else np.asarray(stack, dtype=np.int64)
    theta = -axis_angle
    rot = rotate_image_nn(img, theta)
    sym_rot = np.minimum(rot, reflect_vertical(rot))
    sym = np.minimum(rotate_image_nn(sym_rot, -theta), img)
    res = img - sym

    def wrap(p):
        if isinstance(stack, StackImage):
            return StackImage(p, stack.frame_count, stack.registration, stack.lons, stack.meta)
        return p

    return wrap(sym), wrap(res)
