"""Bandwidth generation and joint penalty/model-size selection.

Bandwidth sets follow either a Fibonacci recurrence capped at half the
sample size, or the practical rule ``G_h = floor((h+2) * G1 / 3)`` (three
bandwidths by default).  The penalty and the number of change points are
chosen together by sample-splitting cross-validation: candidate
segmentations are produced with the detector threshold disabled, ranked by
detector value, and scored by fitting on odd-indexed rows and predicting the
even-indexed ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lasso
from .detector import (PreEstimate, WindowSolver, build_grid, compute_detector,
                       select_pre_estimators)
from .refine import make_refinement_window, refine_location


@dataclass(frozen=True)
class BandwidthRule:
    """Specification for generating a bandwidth set from ``G1``.

    ``fibonacci`` iterates ``G_m = G_{m-1} + G_{m-2}`` (with
    ``G_0 = G_1 = G1``) keeping all terms below ``floor(n/2)``;
    ``practical`` takes ``G1`` and ``floor((h+2)*G1/3)`` for ``h >= 2`` up
    to ``H_cap`` terms (default 3).
    """

    mode: str
    G1: int
    n: int
    H_cap: int | None = None


def generate_bandwidths(rule: BandwidthRule) -> list[int]:
    """Sorted, deduplicated bandwidth set for the given rule."""
    half = rule.n // 2
    if not (2 <= rule.G1 < half):
        raise ValueError(f"G1={rule.G1} outside [2, floor(n/2)) for n={rule.n}")
    if rule.mode == "fibonacci":
        out = [rule.G1]
        prev2, prev1 = rule.G1, rule.G1
        while True:
            nxt = prev1 + prev2
            if nxt >= half:
                break
            out.append(nxt)
            prev2, prev1 = prev1, nxt
        return sorted(set(out))
    if rule.mode == "practical":
        cap = rule.H_cap if rule.H_cap is not None else 3
        out = [rule.G1]
        h = 2
        while len(out) < cap:
            g = ((h + 2) * rule.G1) // 3
            if g > half - 1:
                break
            out.append(g)
            h += 1
        return sorted(set(out))
    raise ValueError(f"unknown bandwidth rule mode {rule.mode!r}")


def recommend_bandwidth(n: int, p: int) -> int:
    """Bandwidth targeting a sample-size-dependent estimation error level.

    Evaluates ``G = floor(exp((log(3.2/log n) - 1.665*log(sqrt(log p))) /
    (-0.449)))``, clamped to ``[10, floor(n/2) - 1]``.  The constants come
    from regressing local estimation error on window length and dimension.
    """
    if n < 20 or p < 2:
        raise ValueError("recommend_bandwidth requires n >= 20 and p >= 2")
    c1, c2, c = -0.449, 1.665, 3.2
    target = c / math.log(n)
    g = math.floor(math.exp((math.log(target) - c2 * math.log(math.sqrt(math.log(p)))) / c1))
    return int(min(max(g, 10), n // 2 - 1))


def default_lambda_grid(dataset, grid, size: int = 5) -> list[float]:
    """Geometric penalty grid from ``1e-3 * lam_max`` up to ``lam_max``.

    ``lam_max`` is the largest single-window ``lambda_max`` over the Stage-1
    windows of ``grid``.  Degenerate data (``lam_max == 0``) yields ``[0]``.
    """
    G = grid.bandwidth
    lam_max = 0.0
    for k in grid.points:
        lam_max = max(lam_max,
                      lasso.lambda_max(dataset, int(k) - G, int(k)),
                      lasso.lambda_max(dataset, int(k), int(k) + G))
    if lam_max <= 0.0:
        return [0.0]
    return list(np.geomspace(1e-3 * lam_max, lam_max, size))


@dataclass(frozen=True)
class CVPathEntry:
    """Candidate models for one penalty value.

    Pre-estimators are ranked by descending detector value; ``refined``
    aligns with that ranking.  ``scores[m]`` is the validation error of the
    model keeping the ``m`` top-ranked change points.
    """

    lam: float
    pre_estimates: tuple[PreEstimate, ...]
    refined: tuple[int, ...]
    fell_back: tuple[bool, ...]
    scores: tuple[float, ...]


@dataclass
class CVReport:
    """Outcome of the odd/even cross-validation over a penalty grid."""

    bandwidth: int
    resolution: float
    alpha: float
    lambda_grid: list[float]
    entries: list[CVPathEntry]
    lambda_star: float
    m_star: int
    selected_pre_estimates: list[PreEstimate]
    selected_change_points: list[int]
    zero_fit_fallback: bool = False
    solve_count: int = 0

    def scores_csv(self) -> str:
        lines = ["lambda,m,score"]
        for entry in self.entries:
            for m, score in enumerate(entry.scores):
                lines.append(f"{entry.lam:.17g},{m},{score:.17g}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "bandwidth": self.bandwidth,
            "resolution": self.resolution,
            "alpha": self.alpha,
            "lambda_grid": [float(l) for l in self.lambda_grid],
            "lambda_star": float(self.lambda_star),
            "m_star": int(self.m_star),
            "selected_change_points": [int(k) for k in self.selected_change_points],
            "selected_pre_estimators": [
                {"location": p.location, "detector_value": p.detector_value,
                 "bandwidth": p.bandwidth, "interval": list(p.interval)}
                for p in self.selected_pre_estimates
            ],
            "path": [
                {"lambda": float(e.lam),
                 "ranked_pre_estimators": [p.location for p in e.pre_estimates],
                 "refined": list(e.refined),
                 "scores": [float(s) for s in e.scores]}
                for e in self.entries
            ],
            "zero_fit_fallback": self.zero_fit_fallback,
        }


def _cv_score(dataset, odd_dataset, boundaries, lam, fit_cache):
    """Fit per-segment Lasso on odd rows, sum squared errors on even rows.

    Row parity is 1-based: rows 1, 3, 5, ... (0-based even indices) train
    and rows 2, 4, 6, ... validate.  The odd rows of segment ``[lo, hi)``
    are the contiguous window ``((lo+1)//2, (hi+1)//2]`` of the odd-row
    subsample, so fits go through the windowed solver.  Segments with fewer
    than 2 training rows contribute through a zero-coefficient fallback fit.
    """
    edges = [0] + list(boundaries) + [dataset.n]
    total = 0.0
    fell_back = False
    for lo, hi in zip(edges[:-1], edges[1:]):
        key = (lo, hi)
        cached = fit_cache.get(key)
        if cached is None:
            o_lo, o_hi = (lo + 1) // 2, (hi + 1) // 2
            if o_hi - o_lo < 2:
                beta = np.zeros(dataset.p)
                seg_fell_back = True
            else:
                beta, _, _ = lasso._fit_window(odd_dataset, o_lo, o_hi, lam,
                                               phase="cv")
                seg_fell_back = False
            valid = np.arange(lo + (1 - lo % 2), hi, 2)
            resid = dataset.y[valid] - dataset.X[valid] @ beta
            cached = (float(resid @ resid), seg_fell_back)
            fit_cache[key] = cached
        total += cached[0]
        fell_back = fell_back or cached[1]
    return total, fell_back


def cross_validate(dataset, bandwidth: int, resolution: float | None = None,
                   alpha: float = 0.25, lambda_grid=None,
                   threads: int | None = None) -> CVReport:
    """Select the penalty and the number of change points for one bandwidth.

    For each penalty value, Stage 1 runs with the threshold disabled (all
    local maximisers kept) and Stage 2 refines every pre-estimator.  Refined
    estimators, ranked by the detector values of their pre-estimators, form
    a nested model path; each path prefix is scored by odd/even sample
    splitting.  The ``(lambda, m)`` pair with the smallest score wins; ties
    prefer fewer change points, then the larger penalty.  The selected model
    (both its pre-estimators and its refined locations, re-sorted ascending)
    is reported.
    """
    if dataset.n < 4:
        raise ValueError("cross-validation needs at least 4 rows")
    grid = build_grid(dataset.n, bandwidth, resolution)
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(dataset, grid)
    if not len(lambda_grid):
        raise ValueError("lambda grid is empty")
    lams = sorted({float(l) for l in lambda_grid}, reverse=True)
    from .data import Dataset
    odd_dataset = Dataset(dataset.y[::2].copy(), dataset.X[::2].copy())

    entries = []
    solver_prev = None
    total_solves = 0
    any_fallback = False
    for lam in lams:
        solver = WindowSolver(dataset, lam, warm_from=solver_prev, phase="cv")
        series = compute_detector(dataset, grid, lam, solver, threads=threads,
                                  keep_fits=False)
        pres = select_pre_estimators(series, 0.0, alpha)
        pres_ranked = sorted(pres, key=lambda p: (-p.detector_value, p.location))
        refined = []
        fell_back = []
        for pre in pres_ranked:
            window = make_refinement_window(dataset, pre.location, bandwidth,
                                            lam, solver)
            res = refine_location(dataset, window)
            refined.append(res.location)
            fell_back.append(res.fell_back)
        fit_cache: dict[tuple[int, int], tuple[float, bool]] = {}
        scores = []
        for m in range(len(pres_ranked) + 1):
            boundaries = sorted(set(refined[:m]))
            score, fb = _cv_score(dataset, odd_dataset, boundaries, lam, fit_cache)
            scores.append(score)
            any_fallback = any_fallback or fb
        entries.append(CVPathEntry(lam=lam, pre_estimates=tuple(pres_ranked),
                                   refined=tuple(refined),
                                   fell_back=tuple(fell_back),
                                   scores=tuple(scores)))
        total_solves += solver.solve_count
        solver_prev = solver

    best = None
    best_key = None
    for entry in entries:
        for m, score in enumerate(entry.scores):
            key = (score, m, -entry.lam)
            if best_key is None or key < best_key:
                best_key = key
                best = (entry, m)
    entry, m_star = best
    order = np.argsort(entry.refined[:m_star], kind="stable")
    selected_refined = [int(entry.refined[i]) for i in order]
    selected_pre = [entry.pre_estimates[i] for i in order]
    return CVReport(
        bandwidth=bandwidth,
        resolution=grid.resolution,
        alpha=alpha,
        lambda_grid=lams,
        entries=entries,
        lambda_star=entry.lam,
        m_star=m_star,
        selected_pre_estimates=selected_pre,
        selected_change_points=selected_refined,
        zero_fit_fallback=any_fallback,
        solve_count=total_solves,
    )
