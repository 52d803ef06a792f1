"""Replicated benchmark runs over the simulation presets."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .metrics import EvalReport, hausdorff_scaled
from .pipeline import segment_cv, segment_multiscale_cv
from .simulate import generate, preset
from .tuning import recommend_bandwidth

#: Default bandwidths per preset: (single bandwidth, multiscale set).
#: ``None`` entries are derived from the data size at run time.
PRESET_BANDWIDTHS = {
    "S1": (75, [60, 80, 100]),
    "S2": (75, [60, 80, 100]),
    "S3": (None, None),
    "S4": (100, [60, 80, 100]),
    "S5": (60, [60, 80, 100]),
    "E_heavy": (75, [50, 100, 150]),
    "E_dep": (75, [50, 100, 150]),
}


def default_bandwidths(name: str, config) -> tuple[int, list[int]]:
    single, multi = PRESET_BANDWIDTHS.get(name, (None, None))
    if single is None:
        g1 = recommend_bandwidth(config.n, config.p)
        single = min(3 * config.n // 16, config.n // 2 - 1)
        multi = [g1, (4 * g1) // 3, (5 * g1) // 3]
    return single, multi


@dataclass
class BenchmarkOutcome:
    reports: list[EvalReport]
    timings: dict = field(default_factory=dict)
    solve_counts: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = [EvalReport.csv_header()]
        lines += [r.csv_row() for r in self.reports]
        lines.append("")
        lines.append("method,phase,seconds,solves")
        for method in sorted(self.timings):
            for phase in sorted(self.timings[method]):
                secs = self.timings[method][phase]
                solves = self.solve_counts[method].get(phase.removesuffix("_s"), 0)
                lines.append(f"{method},{phase.removesuffix('_s')},{secs:.3f},{solves}")
        return "\n".join(lines) + "\n"


def run_benchmark(name: str, reps: int, base_seed: int = 0,
                  methods=("single", "multiscale"), resolution=None,
                  single_bandwidth=None, multi_bandwidths=None,
                  threads=None, preset_params=None) -> BenchmarkOutcome:
    """Run ``reps`` replications of a preset and aggregate per-method reports.

    Replication ``i`` uses seed ``base_seed + i``.  Both methods see the same
    datasets; tuning is by cross-validation throughout.
    """
    preset_params = preset_params or {}
    reports = {m: EvalReport(method=m) for m in methods}
    timings = {m: {} for m in methods}
    solves = {m: {} for m in methods}
    for i in range(reps):
        config = preset(name, seed=base_seed + i, **preset_params)
        dataset = generate(config)
        g_single, g_multi = default_bandwidths(name, config)
        if single_bandwidth is not None:
            g_single = single_bandwidth
        if multi_bandwidths is not None:
            g_multi = list(multi_bandwidths)
        for method in methods:
            t0 = time.perf_counter()
            if method == "single":
                result = segment_cv(dataset, g_single, resolution=resolution,
                                    threads=threads)
            else:
                result = segment_multiscale_cv(dataset, g_multi,
                                               resolution=resolution,
                                               threads=threads)
            elapsed = time.perf_counter() - t0
            d = None
            if config.q > 0:
                d = hausdorff_scaled(result.change_points, config.change_points,
                                     config.n)
            reports[method].add(result.q_hat, config.q, d, seed=config.seed,
                                change_points=result.change_points,
                                elapsed_s=elapsed)
            for phase, secs in result.timings.items():
                timings[method][phase] = timings[method].get(phase, 0.0) + secs
            for phase, cnt in result.solve_counts.items():
                solves[method][phase] = solves[method].get(phase, 0) + cnt
    return BenchmarkOutcome(reports=[reports[m] for m in methods],
                            timings=timings, solve_counts=solves)


def runtime_sweep(name: str, p_values, seed: int = 0, threads=None,
                  preset_params=None) -> list[tuple[int, float]]:
    """Wall-clock of one multiscale CV run per dimension value.

    The preset's design is truncated or zero-padded to each requested
    dimension; emits ``(p, seconds)`` pairs for plotting.
    """
    from .simulate import SimConfig

    preset_params = preset_params or {}
    out = []
    for p in p_values:
        base = preset(name, seed=seed, **preset_params)
        betas = np.zeros((base.q + 1, p))
        keep = min(p, base.p)
        betas[:, :keep] = base.betas[:, :keep]
        config = SimConfig(n=base.n, p=p, change_points=base.change_points,
                           betas=betas, covariance=base.covariance,
                           noise=base.noise,
                           covariate_process=base.covariate_process,
                           covariate_phi=base.covariate_phi,
                           covariate_dist=base.covariate_dist, seed=base.seed)
        dataset = generate(config)
        _, g_multi = default_bandwidths(name, config)
        t0 = time.perf_counter()
        segment_multiscale_cv(dataset, g_multi, threads=threads)
        out.append((p, time.perf_counter() - t0))
    return out
