"""Stage 1: moving-window detector on a coarse grid.

For a bandwidth ``G`` the detector at a grid point ``k`` contrasts Lasso
fits on the two adjacent windows ``(k-G, k]`` and ``(k, k+G]``:

    T_k = sqrt(G/2) * |beta_right - beta_left|_2.

Peaks of ``T`` mark parameter changes; thresholded local maximisers over the
grid become pre-estimators.  Window fits are cached by ``(start, end)`` so
each distinct window is solved exactly once per penalty value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import lasso


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid for one bandwidth.

    The grid holds ``G + floor(r*G)*m`` for ``m = 0..floor((n-2G)/(r*G))``
    plus the right endpoint ``n - G``, deduplicated and sorted.  With
    ``r = 1/G`` this is the finest grid ``{G, ..., n-G}``.
    """

    n: int
    bandwidth: int
    resolution: float
    points: np.ndarray

    def __len__(self):
        return len(self.points)


def build_grid(n: int, bandwidth: int, resolution: float | None = None) -> GridSpec:
    """Build the evaluation grid for ``bandwidth`` over ``n`` samples.

    Parameters
    ----------
    n, bandwidth : int
        Sample size and window half-width; requires ``2 * bandwidth <= n``.
    resolution : float, optional
        Grid coarseness ``r`` in ``[1/G, 1)``; defaults to the finest grid
        ``r = 1/G``.
    """
    G = int(bandwidth)
    if G < 2 or 2 * G > n:
        raise ValueError(f"bandwidth {G} invalid for n={n} (need 2 <= G <= n/2)")
    r = 1.0 / G if resolution is None else float(resolution)
    if not (1.0 / G <= r < 1.0):
        raise ValueError(f"resolution {r} outside [1/G, 1) for G={G}")
    step = int(math.floor(r * G))
    m_max = int(math.floor((n - 2 * G) / (r * G)))
    points = G + step * np.arange(m_max + 1, dtype=np.int64)
    points = np.unique(np.append(points, n - G))
    return GridSpec(n=n, bandwidth=G, resolution=r, points=points)


class WindowSolver:
    """Cached Lasso fits on windows of one dataset at one penalty value.

    Fits are keyed by ``(start, end)``.  An optional ``warm_from`` solver
    (typically the same windows at the previous, larger penalty) supplies
    warm starts.  ``solve_count`` reports cache misses, i.e. actual
    coordinate-descent runs.
    """

    def __init__(self, dataset, lam: float, warm_from: "WindowSolver | None" = None,
                 phase: str = "stage1"):
        self.dataset = dataset
        self.lam = lam
        self.phase = phase
        self._warm_from = warm_from
        self._fits: dict[tuple[int, int], np.ndarray] = {}
        self.solve_count = 0

    def fit(self, start: int, end: int) -> np.ndarray:
        key = (start, end)
        beta = self._fits.get(key)
        if beta is None:
            warm = None
            if self._warm_from is not None:
                warm = self._warm_from._fits.get(key)
            beta, _, _ = lasso._fit_window(
                self.dataset, start, end, self.lam,
                warm_start=warm, phase=self.phase,
            )
            self._fits[key] = beta
            self.solve_count += 1
        return beta

    def prefetch(self, windows, threads: int | None = None) -> None:
        """Solve the given distinct windows, optionally on a thread pool.

        Each window's fit is computed independently (warm starts come only
        from the window-keyed ``warm_from`` chain), so the cached fits are
        bitwise identical whatever the thread count.
        """
        todo = [w for w in dict.fromkeys(windows) if w not in self._fits]
        if threads is not None and threads > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(lambda w: self.fit(*w), todo))
        else:
            for w in todo:
                self.fit(*w)


@dataclass(frozen=True)
class DetectorSeries:
    """Detector values over a grid, with the per-point window fits."""

    grid: GridSpec
    values: np.ndarray
    left_fits: np.ndarray | None = None
    right_fits: np.ndarray | None = None

    def to_csv(self, path) -> None:
        """Export as CSV with columns ``k, T_k, bandwidth``."""
        with open(path, "w") as fh:
            fh.write("k,T_k,bandwidth\n")
            for k, v in zip(self.grid.points, self.values):
                fh.write(f"{k},{v:.17g},{self.grid.bandwidth}\n")


def compute_detector(dataset, grid: GridSpec, lam: float,
                     solver: WindowSolver | None = None,
                     threads: int | None = None,
                     keep_fits: bool = True) -> DetectorSeries:
    """Evaluate the detector at every grid point.

    Windows are collected first and solved through a shared cache (each
    distinct window once), then the series is assembled in grid order.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    G = grid.bandwidth
    if solver is None:
        solver = WindowSolver(dataset, lam)
    windows = []
    for k in grid.points:
        windows.append((int(k) - G, int(k)))
        windows.append((int(k), int(k) + G))
    solver.prefetch(windows, threads=threads)
    scale = np.sqrt(G / 2.0)
    values = np.empty(len(grid.points))
    left = np.empty((len(grid.points), dataset.p)) if keep_fits else None
    right = np.empty((len(grid.points), dataset.p)) if keep_fits else None
    for i, k in enumerate(grid.points):
        bl = solver.fit(int(k) - G, int(k))
        br = solver.fit(int(k), int(k) + G)
        values[i] = scale * np.linalg.norm(br - bl)
        if keep_fits:
            left[i] = bl
            right[i] = br
    return DetectorSeries(grid=grid, values=values, left_fits=left, right_fits=right)


@dataclass(frozen=True)
class PreEstimate:
    """A thresholded local maximiser of the detector on the grid.

    ``interval`` is the detection interval
    ``[k - floor(alpha*G) + 1, k + floor(alpha*G)]`` (both ends inclusive)
    for the localisation parameter used at selection time.
    """

    location: int
    detector_value: float
    bandwidth: int
    interval: tuple[int, int]


def detection_interval(location: int, bandwidth: int, alpha: float) -> tuple[int, int]:
    w = int(math.floor(alpha * bandwidth))
    return (location - w + 1, location + w)


def select_pre_estimators(series: DetectorSeries, threshold: float,
                          alpha: float) -> list[PreEstimate]:
    """Accept grid points that exceed the threshold and maximise the
    detector over the grid within their detection interval.

    Argmax ties are broken toward the smaller index, so of two equal-valued
    points within one interval only the left one is accepted.  Result sorted
    by location.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    points = series.grid.points
    values = series.values
    G = series.grid.bandwidth
    w = int(math.floor(alpha * G))
    accepted = []
    for i, k in enumerate(points):
        if not values[i] > threshold:
            continue
        lo = np.searchsorted(points, k - w + 1, side="left")
        hi = np.searchsorted(points, k + w, side="right")
        seg = values[lo:hi]
        best = lo + int(np.argmax(seg))  # argmax takes the first maximum
        if best == i:
            accepted.append(
                PreEstimate(
                    location=int(k),
                    detector_value=float(values[i]),
                    bandwidth=G,
                    interval=detection_interval(int(k), G, alpha),
                )
            )
    return accepted
