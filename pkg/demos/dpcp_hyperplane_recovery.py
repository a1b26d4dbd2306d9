#!/usr/bin/env python3
"""Robust hyperplane recovery: L1 pursuit vs plain least squares.

Builds a 9-dimensional dataset whose inliers span a hyperplane and whose
outliers are uniform on the sphere, then compares the hyperplane normal
recovered by DPCP-IRLS against the plain least-singular-vector fit as the
outlier fraction grows.
"""

import numpy as np

from robustfit import angle_between, dpcp_irls, least_singular_vector

rng = np.random.default_rng(0)
d, n_inliers = 9, 500

normal = rng.normal(size=d)
normal /= np.linalg.norm(normal)
basis = np.linalg.svd(normal[None, :])[2][1:].T  # d x (d-1) hyperplane basis

print(f"{'outliers':>9} {'LSV angle (deg)':>16} {'DPCP angle (deg)':>17}")
for n_outliers in (0, 100, 250, 500, 1000, 2000):
    inliers = basis @ rng.normal(size=(d - 1, n_inliers))
    inliers /= np.linalg.norm(inliers, axis=0)
    outliers = rng.normal(size=(d, n_outliers))
    if n_outliers:
        outliers /= np.linalg.norm(outliers, axis=0)
    y = np.hstack([inliers, outliers])

    lsv = least_singular_vector(y.T)
    robust = dpcp_irls(y)
    print(
        f"{n_outliers:>9} "
        f"{np.degrees(angle_between(lsv, normal)):>16.4f} "
        f"{np.degrees(angle_between(robust, normal)):>17.6f}"
    )

print()
print("Least squares drifts as outliers accumulate; the L1 objective keeps")
print("the recovered normal pinned to the true hyperplane.")
