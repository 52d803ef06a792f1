"""End-to-end segmentation drivers and the result container.

``segment`` runs the two-stage single-bandwidth procedure; ``segment_multiscale``
runs Stage 1 at several bandwidths and combines pre-estimators through the
anchor/cluster rules before refining.  The ``*_cv`` variants select the
penalty and the number of change points by cross-validation instead of
taking ``lam`` and ``threshold`` directly.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import lasso
from .detector import (DetectorSeries, PreEstimate, WindowSolver, build_grid,
                       compute_detector, select_pre_estimators)
from .multiscale import (Cluster, MultiscaleState, cluster_pre_estimators,
                         identify_anchors, refine_cluster)
from .refine import make_refinement_window, refine_location
from .tuning import CVReport, cross_validate


@dataclass(frozen=True)
class SegmentFit:
    """Final Lasso coefficients on one fitted segment ``(start, end]``."""

    start: int
    end: int
    beta: np.ndarray


@dataclass
class SegmentationResult:
    """Estimated change points with supporting detail.

    ``change_points`` are the refined locations (sorted); ``pre_estimates``
    the Stage-1 candidates behind them.  ``clusters`` is empty for
    single-bandwidth runs.  ``timings`` and ``solve_counts`` record
    wall-clock seconds and coordinate-descent solve counts per phase.
    """

    q_hat: int
    change_points: list[int]
    pre_estimates: list[PreEstimate]
    clusters: list[Cluster]
    segments: list[SegmentFit]
    bandwidths: list[int]
    params: dict
    warnings: list[str] = field(default_factory=list)
    detector_series: list[DetectorSeries] = field(default_factory=list)
    cv_reports: list[CVReport] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    solve_counts: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def pre_dict(p: PreEstimate) -> dict:
            return {
                "location": p.location,
                "detector_value": p.detector_value,
                "bandwidth": p.bandwidth,
                "interval": list(p.interval),
            }

        return {
            "q_hat": self.q_hat,
            "change_points": [int(k) for k in self.change_points],
            "pre_estimators": [pre_dict(p) for p in self.pre_estimates],
            "clusters": [
                {
                    "anchor": pre_dict(c.anchor),
                    "members": [pre_dict(m) for m in c.members],
                    "G_min": c.G_min,
                    "G_max": c.G_max,
                    "G_star": c.G_star,
                }
                for c in self.clusters
            ],
            "segments": [
                {
                    "start": seg.start,
                    "end": seg.end,
                    "beta_sparse": {
                        "index": [int(j) for j in np.flatnonzero(seg.beta)],
                        "value": [float(v) for v in seg.beta[seg.beta != 0]],
                    },
                }
                for seg in self.segments
            ],
            "bandwidths": [int(g) for g in self.bandwidths],
            "params": self.params,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def _dedup_refined(pairs):
    """Sort refined locations; on a collision keep the larger detector value."""
    best: dict[int, tuple[float, PreEstimate]] = {}
    for loc, score, pre in pairs:
        if loc not in best or score > best[loc][0]:
            best[loc] = (score, pre)
    locs = sorted(best)
    return locs, [best[k][1] for k in locs]


def _fit_segments(dataset, change_points, lam):
    edges = [0] + [int(k) for k in change_points] + [dataset.n]
    segments = []
    n_fits = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo >= 2:
            beta, _, _ = lasso._fit_window(dataset, lo, hi, lam, phase="segments")
            n_fits += 1
        else:
            beta = np.zeros(dataset.p)
        segments.append(SegmentFit(lo, hi, beta))
    return segments, n_fits


def segment(dataset, bandwidth: int, lam: float, threshold: float,
            resolution: float | None = None, alpha: float = 0.25,
            threads: int | None = None) -> SegmentationResult:
    """Two-stage single-bandwidth segmentation with explicit tuning values."""
    t0 = time.perf_counter()
    grid = build_grid(dataset.n, bandwidth, resolution)
    solver = WindowSolver(dataset, lam, phase="stage1")
    series = compute_detector(dataset, grid, lam, solver, threads=threads)
    pres = select_pre_estimators(series, threshold, alpha)
    n_stage1 = solver.solve_count
    t1 = time.perf_counter()

    plug_ins = []
    for pre in pres:
        windows = []
        kl = pre.location - bandwidth // 2
        kr = pre.location + bandwidth // 2
        windows.append((max(kl - bandwidth, 0), kl))
        windows.append((kr, min(kr + bandwidth, dataset.n)))
        plug_ins.extend(w for w in windows if w[1] - w[0] >= 2)
    solver.prefetch(plug_ins, threads=threads)
    refined = []
    warnings = []
    for pre in pres:
        window = make_refinement_window(dataset, pre.location, bandwidth, lam, solver)
        res = refine_location(dataset, window)
        if res.fell_back:
            warnings.append(f"plug-in window collapsed at pre-estimator {pre.location}")
        refined.append((res.location, pre.detector_value, pre))
    locs, kept_pres = _dedup_refined(refined)
    n_refine = solver.solve_count - n_stage1
    t2 = time.perf_counter()

    segments, n_seg_fits = _fit_segments(dataset, locs, lam)
    t3 = time.perf_counter()
    return SegmentationResult(
        q_hat=len(locs),
        change_points=locs,
        pre_estimates=kept_pres,
        clusters=[],
        segments=segments,
        bandwidths=[bandwidth],
        params={"lam": lam, "threshold": threshold, "alpha": alpha,
                "resolution": grid.resolution, "cv": False},
        warnings=warnings,
        detector_series=[series],
        timings={"stage1_s": t1 - t0, "refine_s": t2 - t1, "segments_s": t3 - t2},
        solve_counts={"stage1": n_stage1, "refine": n_refine,
                      "segments": n_seg_fits},
    )


def _multiscale_from_pre_estimates(dataset, per_bandwidth, bandwidths, alpha,
                                   lam_for_bandwidth, segment_lam, params,
                                   detector_series, cv_reports,
                                   stage1_time, n_stage1, threads=None):
    """Anchor, cluster and refine given per-bandwidth pre-estimator lists."""
    t1 = time.perf_counter()
    state = MultiscaleState(bandwidths=list(bandwidths),
                            per_bandwidth=per_bandwidth, alpha=alpha)
    state.anchors = identify_anchors(per_bandwidth, alpha)
    state.clusters = cluster_pre_estimators(state, alpha)

    solvers: dict[float, WindowSolver] = {}
    refined = []
    warnings = []
    for cluster in state.clusters:
        lam = lam_for_bandwidth(cluster.member_at_G_min.bandwidth)
        solver = solvers.setdefault(lam, WindowSolver(dataset, lam, phase="refine"))
        res = refine_cluster(dataset, cluster, lam, solver)
        if res.fell_back:
            warnings.append(
                f"plug-in window collapsed at cluster anchored at {cluster.anchor.location}")
        refined.append((res.location, cluster.anchor.detector_value, cluster.anchor))
    locs, kept = _dedup_refined(refined)
    n_refine = sum(s.solve_count for s in solvers.values())
    t2 = time.perf_counter()

    segments, n_seg_fits = _fit_segments(dataset, locs, segment_lam)
    t3 = time.perf_counter()
    return SegmentationResult(
        q_hat=len(locs),
        change_points=locs,
        pre_estimates=kept,
        clusters=state.clusters,
        segments=segments,
        bandwidths=list(bandwidths),
        params=params,
        warnings=warnings,
        detector_series=detector_series,
        cv_reports=cv_reports,
        timings={"stage1_s": stage1_time, "refine_s": t2 - t1,
                 "segments_s": t3 - t2},
        solve_counts={"stage1": n_stage1, "refine": n_refine,
                      "segments": n_seg_fits},
    )


def segment_multiscale(dataset, bandwidths, lam: float, threshold: float,
                       resolution: float | None = None, alpha: float = 0.75,
                       threads: int | None = None) -> SegmentationResult:
    """Multiscale segmentation with explicit tuning values."""
    bandwidths = sorted(int(g) for g in bandwidths)
    t0 = time.perf_counter()
    solver = WindowSolver(dataset, lam, phase="stage1")
    per_bandwidth = []
    series_all = []
    for G in bandwidths:
        grid = build_grid(dataset.n, G, resolution)
        series = compute_detector(dataset, grid, lam, solver, threads=threads)
        per_bandwidth.append(select_pre_estimators(series, threshold, alpha))
        series_all.append(series)
    n_stage1 = solver.solve_count
    t1 = time.perf_counter()
    params = {"lam": lam, "threshold": threshold, "alpha": alpha,
              "resolution": resolution, "cv": False}
    return _multiscale_from_pre_estimates(
        dataset, per_bandwidth, bandwidths, alpha,
        lam_for_bandwidth=lambda G: lam, segment_lam=lam, params=params,
        detector_series=series_all, cv_reports=[],
        stage1_time=t1 - t0, n_stage1=n_stage1, threads=threads)


def segment_cv(dataset, bandwidth: int, resolution: float | None = None,
               alpha: float = 0.25, lambda_grid=None,
               threads: int | None = None) -> SegmentationResult:
    """Single-bandwidth segmentation with CV-selected penalty and size."""
    t0 = time.perf_counter()
    report = cross_validate(dataset, bandwidth, resolution=resolution,
                            alpha=alpha, lambda_grid=lambda_grid, threads=threads)
    t1 = time.perf_counter()
    segments, n_seg_fits = _fit_segments(dataset, report.selected_change_points,
                                         report.lambda_star)
    t2 = time.perf_counter()
    return SegmentationResult(
        q_hat=len(report.selected_change_points),
        change_points=list(report.selected_change_points),
        pre_estimates=list(report.selected_pre_estimates),
        clusters=[],
        segments=segments,
        bandwidths=[bandwidth],
        params={"lam": report.lambda_star, "m_star": report.m_star,
                "alpha": alpha, "resolution": report.resolution, "cv": True},
        detector_series=[],
        cv_reports=[report],
        timings={"cv_s": t1 - t0, "segments_s": t2 - t1},
        solve_counts={"cv": report.solve_count, "segments": n_seg_fits},
    )


def segment_multiscale_cv(dataset, bandwidths, resolution: float | None = None,
                          alpha: float = 0.75, lambda_grid=None,
                          threads: int | None = None) -> SegmentationResult:
    """Multiscale segmentation with per-bandwidth CV-selected tuning."""
    bandwidths = sorted(int(g) for g in bandwidths)
    t0 = time.perf_counter()
    reports = []
    per_bandwidth = []
    for G in bandwidths:
        report = cross_validate(dataset, G, resolution=resolution, alpha=alpha,
                                lambda_grid=lambda_grid, threads=threads)
        reports.append(report)
        per_bandwidth.append(sorted(report.selected_pre_estimates,
                                    key=lambda p: p.location))
    t1 = time.perf_counter()
    lam_by_G = {G: r.lambda_star for G, r in zip(bandwidths, reports)}
    params = {"lambda_star": lam_by_G, "alpha": alpha, "resolution": resolution,
              "cv": True}
    result = _multiscale_from_pre_estimates(
        dataset, per_bandwidth, bandwidths, alpha,
        lam_for_bandwidth=lambda G: lam_by_G[G],
        segment_lam=lam_by_G[bandwidths[0]],
        params=params, detector_series=[], cv_reports=reports,
        stage1_time=t1 - t0, n_stage1=sum(r.solve_count for r in reports),
        threads=threads)
    result.timings["cv_s"] = t1 - t0
    result.solve_counts["cv"] = sum(r.solve_count for r in reports)
    return result
