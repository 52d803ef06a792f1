"""How the penalty and the number of change points are chosen together.

Cross-validation runs the detector with the threshold disabled, ranks the
candidate change points by detector value, and scores every nested prefix
of that ranking by fitting on odd-indexed rows and predicting even-indexed
ones.  The (penalty, model size) pair with the smallest prediction error
wins.
"""

import numpy as np

import mosumseg as ms

config = ms.preset("S2", seed=3)
dataset = ms.generate(config)
report = ms.cross_validate(dataset, bandwidth=75)

print(f"penalty grid (geometric, from the window lambda_max down):")
print(" ", [round(l, 3) for l in report.lambda_grid])
print(f"\nscore table (rows: lambda; columns: number of change points kept):")
width = max(len(e.scores) for e in report.entries)
header = "  lambda   " + "".join(f"m={m:<9d}" for m in range(width))
print(header)
for entry in report.entries:
    cells = "".join(f"{s:<11.1f}" for s in entry.scores)
    print(f"  {entry.lam:8.3f} {cells}")

print(f"\nchosen: lambda* = {report.lambda_star:.3f}, m* = {report.m_star}")
print(f"selected change points: {report.selected_change_points} "
      f"(truth: {list(config.change_points)})")

entry = next(e for e in report.entries if e.lam == report.lambda_star)
print("\nranked candidates at lambda* (detector value, pre-estimator, refined):")
for pre, refined in zip(entry.pre_estimates, entry.refined):
    print(f"  T = {pre.detector_value:6.2f}  {pre.location:3d} -> {refined}")

# bandwidth set generation rules
rule = ms.BandwidthRule("practical", G1=ms.recommend_bandwidth(dataset.n, dataset.p),
                        n=dataset.n)
print(f"\nrecommended finest bandwidth for (n={dataset.n}, p={dataset.p}): "
      f"{ms.recommend_bandwidth(dataset.n, dataset.p)}")
print(f"practical bandwidth set: {ms.generate_bandwidths(rule)}")
fib = ms.BandwidthRule("fibonacci", G1=10, n=dataset.n)
print(f"fibonacci set from G1=10: {ms.generate_bandwidths(fib)}")
