"""Monte Carlo study of triangulation error against viewing geometry.

Each trial draws a random pole, ``n_views`` random camera frames and
truncated-normal angle noise from its own counter-based stream keyed by
``(seed, trial)``, so results do not depend on how trials are split across
threads. The per-trial least-squares problems are then solved in one batch.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .triangulation import SOLVERS

OUTLIER_THRESHOLD = np.radians(5.0)


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = 100_000
    sigma_alpha: float = np.radians(1.0)
    n_views: int = 2
    seed: int = 0
    bin_width: float = np.radians(2.0)
    method: str = "linear"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n_views < 2:
            raise ValueError("n_views must be >= 2")
        if not self.sigma_alpha >= 0:
            raise ValueError("sigma_alpha must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        if not self.bin_width > 0:
            raise ValueError("bin_width must be positive")
        if self.method not in SOLVERS:
            raise ValueError(f"unknown solver {self.method!r}")


@dataclass
class MonteCarloResult:
    trial: np.ndarray
    beta: np.ndarray
    epsilon: np.ndarray
    bin_centers: np.ndarray
    bin_means: np.ndarray
    bin_counts: np.ndarray
    outlier_count: int
    resample_count: int
    config: MonteCarloConfig

    def binned(self):
        """Non-empty bins as ``(center, mean_epsilon, count)`` tuples."""
        keep = self.bin_counts > 0
        return list(zip(self.bin_centers[keep], self.bin_means[keep], self.bin_counts[keep]))

    def min_bin(self):
        """``(center, mean)`` of the bin with the smallest mean error."""
        b = int(np.nanargmin(self.bin_means))
        return float(self.bin_centers[b]), float(self.bin_means[b])

    def mean_at(self, beta: float) -> float:
        """Binned mean error interpolated linearly between bin centers."""
        keep = self.bin_counts > 0
        return float(np.interp(beta, self.bin_centers[keep], self.bin_means[keep]))

    def summary(self) -> dict:
        center, mean = self.min_bin()
        cfg = asdict(self.config)
        cfg["sigma_alpha_deg"] = float(np.degrees(cfg.pop("sigma_alpha")))
        cfg["bin_width_deg"] = float(np.degrees(cfg.pop("bin_width")))
        return {
            "config": cfg,
            "outlier_count_over_5deg": int(self.outlier_count),
            "resample_count": int(self.resample_count),
            "min_bin_center_deg": float(np.degrees(center)),
            "min_bin_mean_epsilon_deg": float(np.degrees(mean)),
            "mean_epsilon_deg": float(np.degrees(self.epsilon.mean())),
            "median_epsilon_deg": float(np.degrees(np.median(self.epsilon))),
        }


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial: Philox keyed by ``(seed, trial)``."""
    return np.random.Generator(np.random.Philox(key=(int(trial) << 64) | int(seed)))


def _draw_trial(seed, trial, n_views, sigma):
    """Pole, boresights, rolls and angle noise for one trial.

    Geometry where the pole lies along a boresight (in-plane angle undefined)
    or all boresights coincide is redrawn from the same stream.
    """
    g = trial_generator(seed, trial)
    redraws = 0
    while True:
        z = g.standard_normal((n_views + 1, 3))
        roll = 2 * np.pi * g.random(n_views)
        norms = np.sqrt(np.einsum("ij,ij->i", z, z))
        if norms.min() > 1e-12:
            z /= norms[:, None]
            w, k = z[0], z[1:]
            c = k @ w
            # pole off every boresight, and not all boresights parallel
            if c.max() < 1.0 - 1e-15 and -c.min() < 1.0 - 1e-15 \
                    and np.abs(k[1:] @ k[0]).min() < 1.0 - 1e-15:
                break
        redraws += 1
    if sigma > 0:
        x = g.standard_normal(n_views)
        for v in np.flatnonzero(np.abs(x) > 3.0):
            while abs(x[v]) > 3.0:
                x[v] = g.standard_normal()
        noise = sigma * x
    else:
        noise = np.zeros(n_views)
    return w, k, roll, noise, redraws


def _frames(k, roll):
    """Vectorized :func:`frame_from_boresight`; returns ``i, j`` of shape ``k.shape``."""
    helper = np.eye(3)[np.argmin(np.abs(k), axis=-1)]
    i0 = np.cross(helper, k)
    i0 /= np.linalg.norm(i0, axis=-1, keepdims=True)
    j0 = np.cross(k, i0)
    c, s = np.cos(roll)[..., None], np.sin(roll)[..., None]
    return c * i0 - s * j0, s * i0 + c * j0


def _solve(i, j, alpha, rho, method):
    """Batched least squares over trials; ``i, j`` have shape (T, V, 3)."""
    ca, sa = np.cos(alpha)[..., None], np.sin(alpha)[..., None]
    if method == "linear":
        a = np.concatenate([i, j], axis=1)
        b = np.concatenate([rho * np.sin(alpha), -rho * np.cos(alpha)], axis=1)
        ata = np.einsum("tri,trj->tij", a, a)
        atb = np.einsum("tri,tr->ti", a, b)
        x = np.linalg.solve(ata, atb[..., None])[..., 0]
    else:
        rows = ca * i + sa * j
        _, _, vt = np.linalg.svd(rows)
        x = vt[:, -1, :]
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    d0 = sa[:, 0] * i[:, 0] - ca[:, 0] * j[:, 0]
    sign = np.where(np.einsum("td,td->t", x, d0) < 0, -1.0, 1.0)
    return x * sign[:, None]


def run_monte_carlo(cfg: MonteCarloConfig, threads: int = 1) -> MonteCarloResult:
    """Simulate ``cfg.trials`` triangulations and bin the error by geometry.

    ``beta`` is the smallest pairwise boresight angle of a trial and
    ``epsilon`` the angle between true and estimated pole, both in radians.
    """
    nv = cfg.n_views
    trials = np.arange(cfg.trials)

    def chunk(idx):
        return [_draw_trial(cfg.seed, t, nv, cfg.sigma_alpha) for t in idx]

    parts = np.array_split(trials, max(1, min(threads, cfg.trials)))
    if threads <= 1:
        draws = chunk(trials)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            draws = [d for part in pool.map(chunk, parts) for d in part]

    w = np.array([d[0] for d in draws])
    k = np.array([d[1] for d in draws])
    roll = np.array([d[2] for d in draws])
    noise = np.array([d[3] for d in draws])
    resamples = int(sum(d[4] for d in draws))

    i, j = _frames(k, roll)
    wi = np.einsum("td,tvd->tv", w, i)
    wj = np.einsum("td,tvd->tv", w, j)
    rho = np.hypot(wi, wj)
    alpha = np.mod(np.arctan2(wi, -wj), 2 * np.pi) + noise
    omega = _solve(i, j, alpha, rho, cfg.method)
    eps = np.arctan2(np.linalg.norm(np.cross(omega, w), axis=1), np.einsum("td,td->t", omega, w))

    kk = np.einsum("tad,tbd->tab", k, k)
    iu = np.triu_indices(nv, 1)
    beta = np.arccos(np.clip(kk[:, iu[0], iu[1]], -1.0, 1.0)).min(axis=1)

    centers, means, counts = bin_by_beta(beta, eps, cfg.bin_width)
    return MonteCarloResult(trials, beta, eps, centers, means, counts,
                            int((eps > OUTLIER_THRESHOLD).sum()), resamples, cfg)


def bin_by_beta(beta, eps, width):
    """Mean of ``eps`` in bins ``[k w, (k + 1) w)`` over ``[0, pi]``; pi joins the last bin."""
    nbins = int(np.ceil(np.pi / width - 1e-9))
    idx = np.minimum((np.asarray(beta) / width).astype(np.int64), nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    sums = np.bincount(idx, weights=eps, minlength=nbins)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    centers = (np.arange(nbins) + 0.5) * width
    return centers, means, counts
