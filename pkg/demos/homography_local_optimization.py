#!/usr/bin/env python3
"""Compare local-optimization refits on a synthetic homography scene.

One noisy, half-outlier scene; every RANSAC variant consumes the same
minimal-sample sequence (same seed), so differences are attributable to the
refit method alone.
"""

import numpy as np

from robustfit import RansacConfig, SynthConfig, run_ransac, synth_dataset, transfer_error

ds = synth_dataset(
    SynthConfig("homography", n_inliers=100, n_outliers=100, noise_sigma=1.0, seed=42)
)
validation = ds.labels

print(f"scene: {ds.n} correspondences, {ds.outlier_fraction:.0%} outliers, "
      f"noise 1 px, threshold 3 px\n")
print(f"{'method':>7} {'val err (px)':>13} {'inliers':>8} {'iters':>6} {'LO calls':>9} {'ms':>7}")
for method in ("none", "dlt", "huber", "dpcp"):
    cfg = RansacConfig(epsilon=3.0, lo_method=method, seed=7)
    report = run_ransac("homography", ds.x1, ds.x2, cfg, ds.image_size)
    err = transfer_error(report.best.model.m, ds.x1[validation], ds.x2[validation]).mean()
    print(
        f"{method:>7} {err:>13.4f} {report.best.inlier_count:>8} "
        f"{report.iterations_used:>6} {report.lo_invocations:>9} {report.wall_time_ms:>7.1f}"
    )

print("\nAgainst the generating model, the validation inliers carry a noise")
print("floor of about 1.25 px (mean norm of 2-d Gaussian noise at sigma 1).")
err_truth = transfer_error(ds.truth.m, ds.x1[validation], ds.x2[validation]).mean()
print(f"ground-truth model reference error: {err_truth:.4f} px")
