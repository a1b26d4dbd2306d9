#!/usr/bin/env python3
"""Threshold-sensitivity sweep on a synthetic fundamental-matrix benchmark.

Runs the bench harness end to end (synthesize, sweep, summarize, select) the
same way the CLI does, over a small grid so it finishes in seconds.
"""

import numpy as np

from robustfit import SynthConfig, synth_dataset
from robustfit.bench import BenchSettings, run_bench, select_thresholds, summarize
from robustfit.fileio import CorrespondenceFile

ds = synth_dataset(
    SynthConfig("fundamental", n_inliers=120, n_outliers=80, noise_sigma=1.0, seed=11)
)
data = CorrespondenceFile(
    problem="fundamental", image_size=ds.image_size,
    x1=ds.x1, x2=ds.x2, labels=ds.labels,
)

records = run_bench(
    datasets=[("synthetic", data)],
    methods=["none", "dlt", "dpcp"],
    sigmas=[0.0025, 0.005, 0.01],
    trials=8,
    master_seed=99,
    settings=BenchSettings(t_max=500),
)

print(f"{'method':>7} {'sigma':>8} {'mean err':>9} {'median':>8} {'IQR':>8} {'ms':>8}")
for cell in summarize(records):
    print(
        f"{cell['method']:>7} {cell['sigma']:>8.4f} {cell['mean_error_px']:>9.4f} "
        f"{cell['median_error_px']:>8.4f} {cell['iqr_error_px']:>8.4f} "
        f"{cell['mean_wall_ms']:>8.2f}"
    )

print("\nper-method threshold choice (fastest within 1% of minimum error):")
for method, pick in select_thresholds(records).items():
    print(f"  {method}: sigma={pick['sigma']:g} "
          f"(err {pick['mean_error_px']:.4f} px, {pick['mean_wall_ms']:.2f} ms)")
