"""Reproduction cases: rerun an experiment, write its data bundle and check it.

Every case writes CSV/PGM/FPES files plus ``manifest.json`` listing each
check with its measured value, bound and pass flag. The manifest holds no
timings so that reruns with the same seed produce an identical file;
wall-clock times go to ``timing.json``.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from . import io
from .config import PipelineConfig
from .montecarlo import MonteCarloConfig, MonteCarloResult, run_monte_carlo
from .pipeline import run_in_plane
from .spectral import spectral_image

CASES = ("fig_inplane", "fig_reduced", "fig_mc_sigma", "fig_mc_views")
SHAPES = ("diamond", "bilobed")
MODES = ("known_center", "brightness_centroid")


def check(name, value, ok, bound) -> dict:
    return {"name": name, "value": value, "bound": bound, "passed": bool(ok)}


def in_plane_config(resolution=1024, half=False, tau=100.0, seed=0) -> PipelineConfig:
    cfg = PipelineConfig(seed=seed)
    cfg.camera.resolution = resolution
    if half:
        cfg.camera.lon_end_deg = 180.0
    cfg.tau = tau
    return cfg.validate()


def write_in_plane_bundle(out: Path, tag: str, res, cfg: PipelineConfig) -> None:
    io.write_pgm(out / f"{tag}_stack.pgm", res.stack.pixels, maxval=res.stack.frame_count)
    io.write_fpes(out / f"{tag}_spectrum.fpes", spectral_image(res.stack, cfg.tau_px))
    io.write_csv(out / f"{tag}_curve.csv", ["theta_deg", "psi"],
                 zip(np.degrees(res.curve.thetas), res.curve.scores))


def fig_inplane(out: Path, seed=0, threads=1, fast=False) -> list:
    """Stand-in shapes under both registrations, full rotation, tolerance 3 deg."""
    n = 256 if fast else 1024
    cfg = in_plane_config(n, seed=seed)
    rows = []
    checks = []
    for kind in SHAPES:
        cfg.shape.kind = kind
        for mode in MODES:
            res = run_in_plane(cfg, threads, mode)
            tag = f"{kind}_{mode}"
            write_in_plane_bundle(out, tag, res, cfg)
            err = float(np.degrees(res.error))
            rows.append([kind, mode, np.degrees(res.alpha_hat), np.degrees(res.alpha_true), err])
            checks.append(check(f"abs_error_deg[{tag}]", err, err <= 3.0 + 1e-9, "<= 3"))
    io.write_csv(out / "estimates.csv",
                 ["shape", "registration", "alpha_hat_deg", "alpha_true_deg", "abs_error_deg"], rows)
    return checks


def fig_reduced(out: Path, seed=0, threads=1, fast=False) -> list:
    """256 px, half rotation, whole-spectrum disc, brightness-centroid registration."""
    cfg = in_plane_config(256, half=True, tau=126.0, seed=seed)
    rows = []
    checks = []
    for kind in SHAPES:
        cfg.shape.kind = kind
        res = run_in_plane(cfg, threads, "brightness_centroid")
        write_in_plane_bundle(out, kind, res, cfg)
        err = float(np.degrees(res.error))
        rows.append([kind, np.degrees(res.alpha_hat), np.degrees(res.alpha_true), err])
        checks.append(check(f"abs_error_deg[{kind}]", err, err <= 2.0 + 1e-9, "<= 2"))
    io.write_csv(out / "estimates.csv",
                 ["shape", "alpha_hat_deg", "alpha_true_deg", "abs_error_deg"], rows)
    return checks


def write_mc_bundle(out: Path, tag: str, res: MonteCarloResult) -> None:
    io.write_csv(out / f"{tag}_samples.csv", ["trial", "beta_deg", "epsilon_deg"],
                 zip(res.trial, np.degrees(res.beta), np.degrees(res.epsilon)))
    io.write_csv(out / f"{tag}_binned.csv", ["beta_center_deg", "mean_epsilon_deg", "count"],
                 [(round(float(np.degrees(c)), 9), np.degrees(m), k) for c, m, k in res.binned()])
    io.write_json(out / f"{tag}_summary.json", res.summary())


def mc_sigma_checks(res: MonteCarloResult) -> list:
    center, mean = (float(np.degrees(x)) for x in res.min_bin())
    at20 = float(np.degrees(res.mean_at(np.radians(20.0))))
    ratio = at20 / mean
    return [
        check("min_bin_center_deg", center, 80.0 <= center <= 100.0, "[80, 100]"),
        check("min_bin_mean_epsilon_deg", mean, 0.8 <= mean <= 1.5, "[0.8, 1.5]"),
        check("mean_at_20deg_over_min", ratio, ratio <= 1.25, "<= 1.25"),
        check("outliers_over_5deg", res.outlier_count, 500 <= res.outlier_count <= 2200,
              "[500, 2200]"),
    ]


def fig_mc_sigma(out: Path, seed=0, threads=1, fast=False, trials=100_000) -> list:
    """Two-view error against boresight separation for several noise levels."""
    checks = []
    for sigma in (0.5, 1.0, 2.0, 5.0, 10.0):
        res = run_monte_carlo(MonteCarloConfig(trials, np.radians(sigma), 2, seed), threads)
        write_mc_bundle(out, f"sigma_{sigma:g}deg", res)
        if sigma == 1.0:
            checks += mc_sigma_checks(res)
    return checks


def fig_mc_views(out: Path, seed=0, threads=1, fast=False, trials=100_000) -> list:
    """Outlier counts for two, three and four views at 1 deg noise."""
    counts = {}
    for nv in (2, 3, 4):
        res = run_monte_carlo(MonteCarloConfig(trials, np.radians(1.0), nv, seed), threads)
        write_mc_bundle(out, f"views_{nv}", res)
        counts[nv] = res.outlier_count
    io.write_csv(out / "outliers.csv", ["n_views", "outliers_over_5deg"], sorted(counts.items()))
    return [
        check("outliers_decrease_2_3_4", [counts[2], counts[3], counts[4]],
              counts[2] > counts[3] > counts[4], "strictly decreasing"),
        check("outliers_4_views", counts[4], counts[4] <= 30, "<= 30"),
    ]


_RUNNERS = {
    "fig_inplane": fig_inplane,
    "fig_reduced": fig_reduced,
    "fig_mc_sigma": fig_mc_sigma,
    "fig_mc_views": fig_mc_views,
}


def reproduce(case: str, out, seed: int = 0, threads: int = 1, fast: bool = False) -> dict:
    """Run one case into ``out``; returns the manifest (also written to disk)."""
    if case not in _RUNNERS:
        raise ValueError(f"unknown case {case!r}; choose from {CASES}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    checks = _RUNNERS[case](out, seed=seed, threads=threads, fast=fast)
    elapsed = time.perf_counter() - t0
    manifest = {
        "case": case,
        "seed": seed,
        "fast": fast,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    io.write_json(out / "manifest.json", manifest)
    io.write_json(out / "timing.json", {"case": case, "seconds": round(elapsed, 3)})
    return manifest
