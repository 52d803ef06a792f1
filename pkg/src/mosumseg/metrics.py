"""Evaluation utilities: scaled Hausdorff distance, separation rates,
count histograms, and a small exact segmentation oracle for tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

#: Histogram buckets for the change-point count error q_hat - q.
QHAT_BUCKETS = ("<=-3", "-2", "-1", "0", "1", "2", ">=3")


def hausdorff_scaled(estimated, truth, n: int) -> float:
    """Scaled Hausdorff distance between change-point sets.

    ``max`` of the two directed worst-case matching distances, divided by
    ``n``.  An empty estimate scores 1 by convention.  ``truth`` must be
    nonempty and all locations must lie in ``[1, n-1]``.
    """
    truth = [int(k) for k in truth]
    estimated = [int(k) for k in estimated]
    if not truth:
        raise ValueError("truth must be nonempty")
    for k in truth + estimated:
        if not (1 <= k <= n - 1):
            raise ValueError(f"location {k} outside [1, {n - 1}]")
    if not estimated:
        return 1.0
    est = np.asarray(estimated)
    tru = np.asarray(truth)
    d = np.abs(est[:, None] - tru[None, :])
    directed_est = d.min(axis=1).max()
    directed_tru = d.min(axis=0).max()
    return float(max(directed_est, directed_tru)) / n


def separation_rates(config) -> tuple[float, float]:
    """Signal-strength summaries of a simulation configuration.

    The first combines the smallest squared jump with the smallest segment
    length overall; the second takes, change point by change point, the
    squared jump times the shorter adjacent segment, then the minimum.  The
    first never exceeds the second.  Undefined (raises) when there are no
    change points.
    """
    if config.q == 0:
        raise ValueError("separation rates are undefined without change points")
    deltas = config.jump_sizes()
    edges = np.array((0,) + config.change_points + (config.n,))
    spacings = np.diff(edges)
    delta1 = float(deltas.min() ** 2 * spacings.min())
    adjacent = np.minimum(spacings[:-1], spacings[1:])
    delta2 = float((deltas ** 2 * adjacent).min())
    return delta1, delta2


def qhat_bucket(qhat_minus_q: int) -> str:
    if qhat_minus_q <= -3:
        return "<=-3"
    if qhat_minus_q >= 3:
        return ">=3"
    return str(qhat_minus_q)


@dataclass
class EvalReport:
    """Monte-Carlo summary over replications of one method."""

    method: str
    replications: int = 0
    histogram: dict = field(default_factory=lambda: {b: 0 for b in QHAT_BUCKETS})
    hausdorff_values: list = field(default_factory=list)
    records: list = field(default_factory=list)

    def add(self, qhat: int, q: int, hausdorff: float | None, **extra) -> None:
        self.replications += 1
        self.histogram[qhat_bucket(qhat - q)] += 1
        if hausdorff is not None:
            self.hausdorff_values.append(hausdorff)
        self.records.append({"qhat": qhat, "q": q, "hausdorff": hausdorff, **extra})

    @property
    def hausdorff_mean(self) -> float:
        return float(np.mean(self.hausdorff_values)) if self.hausdorff_values else float("nan")

    @property
    def hausdorff_sd(self) -> float:
        if len(self.hausdorff_values) < 2:
            return float("nan")
        return float(np.std(self.hausdorff_values, ddof=1))

    def csv_row(self) -> str:
        cells = [self.method] + [str(self.histogram[b]) for b in QHAT_BUCKETS]
        cells += [f"{self.hausdorff_mean:.4f}", f"{self.hausdorff_sd:.4f}"]
        return ",".join(cells)

    @staticmethod
    def csv_header() -> str:
        return ",".join(["method"] + list(QHAT_BUCKETS) + ["D_mean", "D_sd"])


def _ols_rss(X, y):
    if X.shape[0] <= X.shape[1]:
        return float(y @ y)
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return float(resid @ resid)


def brute_force_segment(dataset, q: int, min_seg: int | None = None) -> list[int]:
    """Exact least-squares segmentation of a tiny instance.

    Dynamic programming over all placements of ``q`` change points with
    per-segment OLS costs and segments of at least ``min_seg`` rows
    (default ``p + 2`` for identifiability).  A testing oracle only:
    requires ``n <= 60`` and ``p <= 3``.
    """
    n, p = dataset.n, dataset.p
    if min_seg is None:
        min_seg = p + 2
    if n > 60 or p > 3 or p >= min_seg:
        raise ValueError("oracle limited to n <= 60, p <= 3, p < min_seg")
    if q < 0 or (q + 1) * min_seg > n:
        raise ValueError(f"cannot place {q} change points with min_seg={min_seg}")

    cost = np.full((n + 1, n + 1), np.inf)
    for s in range(n + 1):
        for e in range(s + min_seg, n + 1):
            cost[s, e] = _ols_rss(dataset.X[s:e], dataset.y[s:e])

    # f[j][e]: best cost of covering (0, e] with j change points inside
    f = np.full((q + 1, n + 1), np.inf)
    arg = np.zeros((q + 1, n + 1), dtype=np.int64)
    f[0] = cost[0]
    for j in range(1, q + 1):
        for e in range((j + 1) * min_seg, n + 1):
            ks = np.arange(j * min_seg, e - min_seg + 1)
            vals = f[j - 1, ks] + cost[ks, e]
            i = int(np.argmin(vals))
            f[j, e] = vals[i]
            arg[j, e] = ks[i]
    if not np.isfinite(f[q, n]):
        raise ValueError("no admissible segmentation")
    out = []
    e = n
    for j in range(q, 0, -1):
        k = int(arg[j, e])
        out.append(k)
        e = k
    return sorted(out)


def enumerate_segment(dataset, q: int, min_seg: int | None = None) -> list[int]:
    """Naive full enumeration; cross-checks the DP oracle on n <= 20."""
    n, p = dataset.n, dataset.p
    if min_seg is None:
        min_seg = p + 2
    if n > 20:
        raise ValueError("enumeration limited to n <= 20")
    best, best_cost = None, np.inf
    for ks in combinations(range(1, n), q):
        edges = (0,) + ks + (n,)
        if any(e - s < min_seg for s, e in zip(edges[:-1], edges[1:])):
            continue
        rss = sum(_ols_rss(dataset.X[s:e], dataset.y[s:e])
                  for s, e in zip(edges[:-1], edges[1:]))
        if rss < best_cost:
            best, best_cost = list(ks), rss
    if best is None:
        raise ValueError("no admissible segmentation")
    return best
