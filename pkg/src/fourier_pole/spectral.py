"""Amplitude spectra and reflective-symmetry scanning.

The in-plane pole angle is found as the direction of strongest mirror
symmetry in the log-power amplitude spectrum of a silhouette stack:

1. co-add the frames,
2. take ``|DFT|`` with the DC term moved to the center pixel,
3. zero everything at radius ``>= tau`` from DC,
4. compress with ``log(1 + A**2)``,
5. rotate by each query angle (nearest neighbor about DC) and score the
   correlation of the result with its left-right mirror,
6. keep the best-scoring angle.

The amplitude spectrum is translation invariant, so the estimate does not
need the stack to be centered on the body.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateImageError
from .geometry import wrap_2pi
from .stack import StackImage, co_add

QUARTER = np.pi / 2


@dataclass(frozen=True)
class SymmetryCurve:
    thetas: np.ndarray
    scores: np.ndarray

    def argmax(self) -> int:
        # np.argmax returns the first maximum, i.e. the smallest angle on ties
        return int(np.argmax(self.scores))


def query_grid(step: float = np.radians(1.0), start: float = 0.0) -> np.ndarray:
    """Query angles ``start, start + step, ...`` below a quarter turn."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    k = int(np.ceil((QUARTER - start) / step - 1e-9))
    return start + step * np.arange(k)


def default_tau(n: int) -> float:
    """Cut-off radius scaled from 100 px at 1024 px."""
    return 100.0 * n / 1024.0


def dft2(img: np.ndarray) -> np.ndarray:
    """Centered 2D DFT, ``F[x, y] = sum I[m, n] exp(-2 pi i (x m + y n) / N)``."""
    return np.fft.fftshift(np.fft.fft2(np.asarray(img, dtype=float)))


def amplitude_spectrum(img) -> np.ndarray:
    if isinstance(img, StackImage):
        img = img.pixels
    return np.abs(dft2(img))


def radial_distance(n: int) -> np.ndarray:
    c = n // 2
    m, k = np.indices((n, n))
    return np.hypot(m - c, k - c)


def low_pass_crop(amp: np.ndarray, tau) -> np.ndarray:
    """Zero every pixel at distance ``>= tau`` from the DC pixel.

    ``tau=None`` or ``"full"`` keeps the whole spectrum.
    """
    amp = np.asarray(amp, dtype=float)
    if tau is None or tau == "full":
        return amp.copy()
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return np.where(radial_distance(amp.shape[0]) < tau, amp, 0.0)


def log_compress(amp: np.ndarray) -> np.ndarray:
    return np.log1p(np.square(amp))


def _rotation_sources(n: int, theta: float):
    """Source indices for a nearest-neighbor rotation by ``theta`` about the center."""
    theta = float(np.mod(theta, 2 * np.pi))
    c = n // 2
    m, k = np.indices((n, n), dtype=float)
    du, dv = k - c, m - c
    ct, st = np.cos(theta), np.sin(theta)
    # inverse rotation R(-theta) applied to output pixel centers
    su = ct * du + st * dv
    sv = -st * du + ct * dv
    # a pixel covers [idx - 1/2, idx + 1/2): floor-binning of the rotated point
    src_n = np.floor(su + c + 0.5).astype(np.int64)
    src_m = np.floor(sv + c + 0.5).astype(np.int64)
    valid = (src_n >= 0) & (src_n < n) & (src_m >= 0) & (src_m < n)
    return src_m, src_n, valid


def rotate_image_nn(img: np.ndarray, theta: float) -> np.ndarray:
    """Rotate ``img`` by ``theta`` about the center pixel, nearest neighbor.

    ``out[m, n] = img`` at ``R(-theta)`` applied to ``(u_n, v_m)``, with
    ``(u, v)`` measured from the center pixel; samples outside the image
    are 0.
    """
    img = np.asarray(img)
    n = img.shape[0]
    src_m, src_n, valid = _rotation_sources(n, theta)
    out = np.zeros_like(img)
    out[valid] = img[src_m[valid], src_n[valid]]
    return out


def reflect_vertical(img: np.ndarray) -> np.ndarray:
    """Mirror about the vertical image axis: ``out[m, n] = img[m, N - 1 - n]``."""
    return np.asarray(img)[:, ::-1]


def correlation_coefficient(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("images differ in shape")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt((da * da).sum() * (db * db).sum())
    if denom == 0.0:
        raise DegenerateImageError("correlation undefined for a constant image")
    return float((da * db).sum() / denom)


def symmetry_score(img: np.ndarray) -> float:
    """Correlation of an image with its left-right mirror."""
    return correlation_coefficient(img, reflect_vertical(img))


def symmetry_curve(img: np.ndarray, thetas: Sequence[float]) -> SymmetryCurve:
    img = np.asarray(img, dtype=float)
    scores = np.array([symmetry_score(rotate_image_nn(img, t)) for t in thetas])
    return SymmetryCurve(np.asarray(thetas, dtype=float), scores)


def angle_from_rotation(theta: float) -> float:
    """In-plane axis angle (mod a quarter turn) made vertical by rotating by ``theta``.

    Rotating by ``theta`` carries an axis at in-plane angle ``a`` to
    ``a + theta``; vertical means ``a + theta = 0`` modulo a half turn, and
    the spectrum's extra orthogonal symmetry reduces that to a quarter turn.
    """
    return float(np.mod(-theta, QUARTER)) % QUARTER


def spectral_image(stack, tau) -> np.ndarray:
    """Log-power, low-passed amplitude spectrum of a stack."""
    return log_compress(low_pass_crop(amplitude_spectrum(stack), tau))


def estimate_in_plane_angle(frames, tau="default", grid=None, domain: str = "frequency"):
    """Estimate the in-plane pole angle modulo a quarter turn.

    ``frames`` may be a list of silhouettes (co-added here) or an existing
    :class:`StackImage`. ``tau="default"`` scales 100 px at 1024 px to the
    image size; ``None``/``"full"`` keeps the whole spectrum. ``domain="space"``
    scans the stack itself instead of its spectrum.

    Returns ``(alpha_hat, curve)`` where ``alpha_hat`` lies in ``[0, pi/2)``
    and ``curve`` holds the score for each query rotation.
    """
    if isinstance(frames, StackImage):
        stack = frames
    else:
        frames = list(frames)
        if len(frames) < 2:
            raise ValueError("need at least two frames")
        stack = co_add(frames)
    grid = query_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("query grid is empty")
    n = stack.n
    if domain == "frequency":
        if isinstance(tau, str) and tau == "default":
            tau = default_tau(n)
        img = spectral_image(stack, tau)
    elif domain == "space":
        img = stack.pixels.astype(float)
    else:
        raise ValueError("domain must be 'frequency' or 'space'")
    if np.ptp(img) == 0:
        raise DegenerateImageError("stack is constant after processing")
    curve = symmetry_curve(img, grid)
    return angle_from_rotation(curve.thetas[curve.argmax()]), curve


def expand_pole_hypotheses(alpha_hat: float) -> np.ndarray:
    """The four pole angles compatible with a quarter-turn-ambiguous estimate."""
    return wrap_2pi(alpha_hat + QUARTER * np.arange(4))


def angular_distance(a, b):
    d = np.mod(np.asarray(a) - np.asarray(b), 2 * np.pi)
    return np.minimum(d, 2 * np.pi - d)


def disambiguate(hypotheses, hint: float) -> float:
    """Hypothesis closest to ``hint``; ties go to the smallest angle."""
    if not np.isfinite(hint):
        raise ValueError("hint must be finite")
    hyp = np.sort(wrap_2pi(np.asarray(hypotheses, dtype=float)))
    d = angular_distance(hyp, hint)
    best = np.flatnonzero(np.isclose(d, d.min(), rtol=0, atol=1e-12))
    return float(hyp[best[0]])
