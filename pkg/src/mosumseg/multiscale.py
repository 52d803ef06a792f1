"""Multiscale combination of pre-estimators across bandwidths.

Stage 1 runs at each bandwidth in turn.  Pre-estimators whose detection
intervals are disjoint from those of every finer-bandwidth pre-estimator
become *anchors*; the anchor count is the estimate of the number of change
points.  Remaining pre-estimators are clustered to the anchors, each cluster
supplying the smallest/largest detecting bandwidths ``G_min``/``G_max`` and
the refinement bandwidth ``G_star = floor(3*G_min/4 + G_max/4)`` used for a
final location refinement around the cluster's finest pre-estimator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .detector import PreEstimate, WindowSolver
from .refine import RefineResult, RefinementWindow, refine_location


def _intersects(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def _extended_interval(pre: PreEstimate) -> tuple[int, int]:
    G = pre.bandwidth
    return (pre.location - G - G // 2 + 1, pre.location + G + G // 2)


@dataclass(frozen=True)
class Cluster:
    """Pre-estimators across bandwidths attributed to one anchor."""

    anchor: PreEstimate
    members: tuple[PreEstimate, ...]
    G_min: int
    G_max: int
    member_at_G_min: PreEstimate

    @property
    def G_star(self) -> int:
        return (3 * self.G_min + self.G_max) // 4


@dataclass
class MultiscaleState:
    """Intermediate state of a multiscale run."""

    bandwidths: list[int]
    per_bandwidth: list[list[PreEstimate]]
    alpha: float
    anchors: list[PreEstimate] = field(default_factory=list)
    clusters: list[Cluster] = field(default_factory=list)


def identify_anchors(per_bandwidth: list[list[PreEstimate]], alpha: float) -> list[PreEstimate]:
    """Anchors: pre-estimators whose detection interval meets no detection
    interval of any pre-estimator found at a strictly smaller bandwidth.

    ``per_bandwidth`` must be ordered by increasing bandwidth.  ``alpha`` is
    recorded for interval bookkeeping only; the intervals themselves were
    fixed at selection time.  Result sorted by location (duplicate locations
    collapse to the finest bandwidth, a safety no-op in practice).
    """
    del alpha  # intervals are carried by the pre-estimates themselves
    anchors = []
    for h, pres in enumerate(per_bandwidth):
        finer = [p for lst in per_bandwidth[:h] for p in lst]
        for cand in pres:
            if all(not _intersects(cand.interval, p.interval) for p in finer):
                anchors.append(cand)
    anchors.sort(key=lambda p: (p.location, p.bandwidth))
    deduped = []
    for a in anchors:
        if deduped and deduped[-1].location == a.location:
            continue
        deduped.append(a)
    return deduped


def cluster_pre_estimators(state: MultiscaleState, alpha: float) -> list[Cluster]:
    """Attach pre-estimators to anchors.

    A pre-estimator joins anchor ``j`` when its detection interval meets the
    anchor's, and its extended interval
    ``{k - G - floor(G/2) + 1, ..., k + G + floor(G/2)}`` is disjoint from
    every other anchor's detection interval.  The anchor always belongs to
    its own cluster.  Among members at the smallest bandwidth, the one
    closest to the anchor (then leftmost) is designated ``member_at_G_min``.
    """
    del alpha
    all_pre = [p for lst in state.per_bandwidth for p in lst]
    clusters = []
    for j, anchor in enumerate(state.anchors):
        others = [a for i, a in enumerate(state.anchors) if i != j]
        members = [anchor]
        for cand in all_pre:
            if cand.location == anchor.location and cand.bandwidth == anchor.bandwidth:
                continue
            if not _intersects(cand.interval, anchor.interval):
                continue
            ext = _extended_interval(cand)
            if any(_intersects(ext, other.interval) for other in others):
                continue
            members.append(cand)
        g_min = min(m.bandwidth for m in members)
        g_max = max(m.bandwidth for m in members)
        finest = [m for m in members if m.bandwidth == g_min]
        finest.sort(key=lambda m: (abs(m.location - anchor.location), m.location))
        members.sort(key=lambda m: (m.bandwidth, m.location))
        clusters.append(
            Cluster(
                anchor=anchor,
                members=tuple(members),
                G_min=g_min,
                G_max=g_max,
                member_at_G_min=finest[0],
            )
        )
    return clusters


def refine_cluster(dataset, cluster: Cluster, lam: float,
                   solver: WindowSolver | None = None) -> RefineResult:
    """Refine one cluster's location with the bandwidth ``G_star``.

    Plug-in coefficients come from the windows
    ``(km - G_min - G_star, km - G_min]`` and
    ``(km + G_min, km + G_min + G_star]`` around the finest member ``km``,
    clamped to the sample; the search covers
    ``{km - G_star + 1, ..., km + G_star}``.  A collapsed plug-in window
    falls back to ``km``.
    """
    n = dataset.n
    km = cluster.member_at_G_min.location
    gm = cluster.G_min
    gs = cluster.G_star
    left = (max(km - gm - gs, 0), km - gm)
    right = (km + gm, min(km + gm + gs, n))
    a = max(km - gs, 0)
    b = min(km + gs, n)
    if left[1] - left[0] < 2 or right[1] - right[0] < 2 or a >= b:
        return RefineResult(km, fell_back=True)
    if solver is None:
        solver = WindowSolver(dataset, lam, phase="refine")
    window = RefinementWindow(
        location=km,
        bandwidth=gs,
        a=a,
        b=b,
        beta_left=solver.fit(*left),
        beta_right=solver.fit(*right),
    )
    return refine_location(dataset, window)
