"""
From in-plane angles to a 3D pole
=================================

Each view only fixes the pole up to a plane containing the boresight. Two or
more views with different boresights pin it down; the error depends mostly
on how far apart the boresights are.

    python demos/triangulation_walkthrough.py
"""

import numpy as np

from fourier_pole.geometry import true_pole_projection_angle
from fourier_pole.montecarlo import MonteCarloConfig, run_monte_carlo
from fourier_pole.triangulation import (InPlaneMeasurement, boresight_displacement,
                                        frame_from_boresight, pole_error, triangulate)

rng = np.random.default_rng(1)
pole = np.array([0.3, -0.2, 0.93])
pole /= np.linalg.norm(pole)

views = [frame_from_boresight(k, r) for k, r in
         [([1.0, 0.0, 0.0], 0.3), ([0.0, 1.0, 0.2], 1.9), ([-0.4, 0.5, -0.7], 4.0)]]
print("boresight separations (deg):",
      [round(np.degrees(boresight_displacement(a, b)), 1) for a, b in
       [(views[0], views[1]), (views[0], views[2]), (views[1], views[2])]])

alphas = [true_pole_projection_angle(pole, f) for f in views]
print("true in-plane angles (deg):", np.round(np.degrees(alphas), 2).tolist())

# noise-free: exact recovery
est = triangulate([InPlaneMeasurement(a, f) for a, f in zip(alphas, views)])
print(f"\nnoise free: error {np.degrees(pole_error(est.omega_hat, pole)):.2e} deg")

# 1 deg of noise on every angle
for trial in range(3):
    noisy = [a + np.radians(rng.normal(0, 1.0)) for a in alphas]
    for n_views in (2, 3):
        est = triangulate([InPlaneMeasurement(a, f) for a, f in zip(noisy[:n_views], views)])
        print(f"noisy draw {trial}, {n_views} views: error {np.degrees(pole_error(est.omega_hat, pole)):.2f} deg")

# error against boresight separation, two views, 1 deg noise
res = run_monte_carlo(MonteCarloConfig(trials=20_000, sigma_alpha=np.radians(1.0), n_views=2, seed=3))
print("\nbeta bin (deg)   mean error (deg)   trials")
for c, m, k in res.binned()[::5]:
    print(f"{np.degrees(c):10.0f} {np.degrees(m):18.2f} {k:8d}")
center, mean = res.min_bin()
print(f"smallest mean error {np.degrees(mean):.2f} deg near beta = {np.degrees(center):.0f} deg;"
      f" {res.outlier_count} of {res.config.trials} trials above 5 deg")
