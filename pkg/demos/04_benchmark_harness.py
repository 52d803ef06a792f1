"""Monte-Carlo evaluation over a simulation preset.

Runs a handful of replications of the no-change configuration at a 10x
data scale (the false-positive stress test) and of the three-regime
setting, and prints the count-error histogram table the way the
benchmark CSV lays it out.  Increase ``reps`` for serious numbers.
"""

from mosumseg.bench import run_benchmark

reps = 10

print("no-change configuration (false positives; histogram column '0' is correct):")
outcome = run_benchmark("S5", reps=reps, base_seed=0, methods=("single",),
                        preset_params={"sparsity": 10}, resolution=0.2)
print(outcome.to_csv())

print("three-regime configuration with a strong signal:")
outcome = run_benchmark("S2", reps=reps, base_seed=0, methods=("multiscale",),
                        resolution=0.2)
print(outcome.to_csv())

print("heavy-tailed variant (scaled t with 5 degrees of freedom):")
outcome = run_benchmark("E_heavy", reps=reps, base_seed=0, methods=("multiscale",),
                        preset_params={"delta": 1.6}, resolution=0.2)
print(outcome.to_csv())
