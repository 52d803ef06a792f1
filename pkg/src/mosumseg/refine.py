"""Stage 2: location refinement via a two-sided residual objective.

Given a pre-estimator ``k~`` with bandwidth ``G``, plug-in coefficient
vectors are fitted on windows placed half a bandwidth to the left and right
of ``k~``, and the refined location is the minimiser over
``k in {k~-G+1, ..., k~+G}`` of

    Q(k) = sum_{t=a+1}^{k} (Y_t - x_t' gamma_L)^2
         + sum_{t=k+1}^{b} (Y_t - x_t' gamma_R)^2

with ``a = k~ - G`` and ``b = k~ + G`` (clamped to the sample range).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .detector import WindowSolver


def objective_q(dataset, k: int, a: int, b: int, gamma_left, gamma_right) -> float:
    """Two-sided residual sum: rows ``(a, k]`` under the left coefficients,
    rows ``(k, b]`` under the right ones."""
    n = dataset.n
    if not (0 <= a < k <= b <= n):
        raise ValueError(f"need 0 <= a < k <= b <= n, got a={a}, k={k}, b={b}, n={n}")
    gl = np.asarray(gamma_left, dtype=np.float64)
    gr = np.asarray(gamma_right, dtype=np.float64)
    rl = dataset.y[a:k] - dataset.X[a:k] @ gl
    rr = dataset.y[k:b] - dataset.X[k:b] @ gr
    return float(rl @ rl + rr @ rr)


@njit(cache=True, nogil=True, fastmath=True)
def _q_profile(XT, y, a, b, gamma_left, gamma_right):
    """Q(k) for every k in (a, b], via one pass of per-row residuals."""
    p = XT.shape[0]
    m = b - a
    rl = np.empty(m)
    rr = np.empty(m)
    for i in range(m):
        t = a + i
        pl = 0.0
        pr = 0.0
        for j in range(p):
            pl += XT[j, t] * gamma_left[j]
            pr += XT[j, t] * gamma_right[j]
        dl = y[t] - pl
        dr = y[t] - pr
        rl[i] = dl * dl
        rr[i] = dr * dr
    total_r = 0.0
    for i in range(m):
        total_r += rr[i]
    out = np.empty(m)
    acc_l = 0.0
    acc_r = total_r
    for i in range(m):
        acc_l += rl[i]
        acc_r -= rr[i]
        out[i] = acc_l + acc_r  # Q(a + 1 + i)
    return out


def _argmin_near(q_values, first_k, lo, hi, center):
    """Index of the minimum of Q over k in [lo, hi]; ties go to the k
    closest to ``center``, then to the smaller k.  Values within a relative
    1e-12 of the minimum count as tied, so a constant objective (equal
    plug-ins) reliably returns ``center`` despite accumulation jitter."""
    qmin = min(q_values[k - first_k] for k in range(lo, hi + 1))
    tol = 1e-12 * (1.0 + abs(qmin))
    best_k = None
    best = (np.inf, np.inf)
    for k in range(lo, hi + 1):
        if q_values[k - first_k] <= qmin + tol:
            key = (abs(k - center), k)
            if key < best:
                best = key
                best_k = k
    return best_k


@dataclass(frozen=True)
class RefinementWindow:
    """Search window and plug-in coefficients around one pre-estimator."""

    location: int
    bandwidth: int
    a: int
    b: int
    beta_left: np.ndarray | None
    beta_right: np.ndarray | None
    plug_in_collapsed: bool = False


@dataclass(frozen=True)
class RefineResult:
    location: int
    fell_back: bool


def make_refinement_window(dataset, location: int, bandwidth: int, lam: float,
                           solver: WindowSolver | None = None) -> RefinementWindow:
    """Fit the plug-in coefficient vectors for one pre-estimator.

    The left fit uses ``(0 v (kL - G), kL]`` with ``kL = location - G//2``,
    the right fit ``(kR, (kR + G) ^ n]`` with ``kR = location + G//2``.  If
    either window has fewer than 2 rows, the refinement falls back to the
    pre-estimator itself.
    """
    n = dataset.n
    G = int(bandwidth)
    k = int(location)
    a = max(k - G, 0)
    b = min(k + G, n)
    kl = k - G // 2
    kr = k + G // 2
    left = (max(kl - G, 0), kl)
    right = (kr, min(kr + G, n))
    if left[1] - left[0] < 2 or right[1] - right[0] < 2:
        return RefinementWindow(k, G, a, b, None, None, plug_in_collapsed=True)
    if solver is None:
        solver = WindowSolver(dataset, lam, phase="refine")
    beta_left = solver.fit(*left)
    beta_right = solver.fit(*right)
    return RefinementWindow(k, G, a, b, beta_left, beta_right)


def refine_location(dataset, window: RefinementWindow) -> RefineResult:
    """Minimise Q over the refinement window.

    Returns the argmin over ``k in {location-G+1, ..., location+G}`` clamped
    to ``[1, n-1]``; ties break toward the k closest to the pre-estimator,
    then toward the smaller k.  A collapsed plug-in window returns the
    pre-estimator unchanged, flagged.
    """
    if window.plug_in_collapsed:
        return RefineResult(window.location, fell_back=True)
    a, b = window.a, window.b
    q_values = _q_profile(dataset.XT, dataset.y, a, b,
                          np.ascontiguousarray(window.beta_left),
                          np.ascontiguousarray(window.beta_right))
    lo = max(a + 1, 1)
    hi = min(b, dataset.n - 1)
    if lo > hi:
        return RefineResult(window.location, fell_back=True)
    k = _argmin_near(q_values, a + 1, lo, hi, window.location)
    return RefineResult(int(k), fell_back=False)
