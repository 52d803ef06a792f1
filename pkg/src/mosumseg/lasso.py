"""Windowed Lasso solver by cyclic coordinate descent.

The objective on a window ``(s, e]`` is

    sum_{t=s+1}^{e} (Y_t - x_t' beta)^2 + lam * sqrt(e - s) * |beta|_1,

i.e. an unnormalized squared loss with the penalty scaled by the square root
of the window length.  Penalty values are therefore directly comparable
across windows of different lengths, which the tuning machinery relies on.
Note this differs from solvers that penalize the mean squared loss (glmnet,
scikit-learn): a deliberate choice, not an oversight.

Coordinates are updated cyclically in order 1..p with full sweeps, so the
result is deterministic for identical inputs.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from numba import njit

MAX_SWEEPS = 10_000
SWEEP_TOL = 1e-7


class SolveCounter:
    """Thread-safe counter of coordinate-descent invocations, by phase."""

    def __init__(self):
        self._lock = threading.Lock()
        self._counts: dict[str, int] = {}

    def add(self, phase: str) -> None:
        with self._lock:
            self._counts[phase] = self._counts.get(phase, 0) + 1

    def count(self, phase: str | None = None) -> int:
        with self._lock:
            if phase is None:
                return sum(self._counts.values())
            return self._counts.get(phase, 0)

    def reset(self) -> None:
        with self._lock:
            self._counts.clear()

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return dict(self._counts)


#: Global instrumentation counter.  Reset it around a run to account solves.
COUNTER = SolveCounter()


@dataclass(frozen=True)
class LassoProblem:
    """A Lasso fit request on the window ``(window_start, window_end]``.

    ``standardize`` divides each column by its standard deviation over the
    window before fitting (coefficients are reported on the original scale);
    ``intercept`` centers ``y`` and the columns within the window.
    """

    window_start: int
    window_end: int
    lam: float
    standardize: bool = False
    intercept: bool = False

    def validate(self, n: int) -> None:
        s, e = self.window_start, self.window_end
        if not (0 <= s < e <= n):
            raise ValueError(f"window ({s}, {e}] invalid for n={n}")
        if e - s < 2:
            raise ValueError(f"window ({s}, {e}] shorter than 2 samples")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")


@dataclass(frozen=True)
class LassoFit:
    """Result of a windowed Lasso solve.

    ``objective`` is the value of the windowed objective at ``beta`` (on the
    original variable scale); ``n_iters`` counts full coordinate sweeps.
    """

    beta: np.ndarray
    intercept_value: float
    objective: float
    n_iters: int
    converged: bool


@njit(cache=True, nogil=True, fastmath=True)
def _cd_sweeps(XT, y, s, e, lam_scaled, beta, max_sweeps, tol):
    """Cyclic coordinate descent on rows [s, e) of (XT, y), in place.

    XT is the (p, n) row-major transpose of the design so each coordinate's
    samples are contiguous.  Zero-variance coordinates are pinned to 0.
    """
    p = XT.shape[0]
    m = e - s
    col_ss = np.empty(p)
    for j in range(p):
        acc = 0.0
        for t in range(s, e):
            acc += XT[j, t] * XT[j, t]
        col_ss[j] = acc
    resid = np.empty(m)
    for i in range(m):
        resid[i] = y[s + i]
    for j in range(p):
        if col_ss[j] <= 0.0:
            beta[j] = 0.0
        bj = beta[j]
        if bj != 0.0:
            for i in range(m):
                resid[i] -= bj * XT[j, s + i]
    thresh = 0.5 * lam_scaled
    for sweep in range(max_sweeps):
        max_delta = 0.0
        max_abs = 0.0
        for j in range(p):
            if col_ss[j] <= 0.0:
                continue
            bj = beta[j]
            z = col_ss[j] * bj
            for i in range(m):
                z += XT[j, s + i] * resid[i]
            if z > thresh:
                bnew = (z - thresh) / col_ss[j]
            elif z < -thresh:
                bnew = (z + thresh) / col_ss[j]
            else:
                bnew = 0.0
            delta = bnew - bj
            if delta != 0.0:
                beta[j] = bnew
                for i in range(m):
                    resid[i] -= delta * XT[j, s + i]
            ad = abs(delta)
            if ad > max_delta:
                max_delta = ad
            ab = abs(bnew)
            if ab > max_abs:
                max_abs = ab
        if max_delta < tol * (1.0 + max_abs):
            return sweep + 1, True
    return max_sweeps, False


@njit(cache=True, nogil=True, fastmath=True)
def _cd_sweeps_gram(G, c, lam_scaled, beta, max_sweeps, tol):
    """Same cyclic sweeps as :func:`_cd_sweeps`, driven by the window Gram
    matrix ``G = X'X`` and gradient ``c = X'y``: visiting an unchanged
    coordinate is O(1), a change costs O(p)."""
    p = c.shape[0]
    v = G @ beta  # v = G beta, maintained incrementally
    thresh = 0.5 * lam_scaled
    for sweep in range(max_sweeps):
        max_delta = 0.0
        max_abs = 0.0
        for j in range(p):
            gjj = G[j, j]
            if gjj <= 0.0:
                beta[j] = 0.0
                continue
            bj = beta[j]
            z = c[j] - v[j] + gjj * bj
            if z > thresh:
                bnew = (z - thresh) / gjj
            elif z < -thresh:
                bnew = (z + thresh) / gjj
            else:
                bnew = 0.0
            delta = bnew - bj
            if delta != 0.0:
                beta[j] = bnew
                for k in range(p):
                    v[k] += delta * G[j, k]
            ad = abs(delta)
            if ad > max_delta:
                max_delta = ad
            ab = abs(bnew)
            if ab > max_abs:
                max_abs = ab
        if max_delta < tol * (1.0 + max_abs):
            return sweep + 1, True
    return max_sweeps, False


def _fit_arrays(XT, y, s, e, lam, warm_start=None, phase="solve"):
    """Raw windowed solve; returns (beta, n_sweeps, converged)."""
    p = XT.shape[0]
    beta = np.zeros(p) if warm_start is None else np.array(warm_start, dtype=np.float64)
    lam_scaled = lam * np.sqrt(e - s)
    n_sweeps, converged = _cd_sweeps(XT, y, s, e, lam_scaled, beta, MAX_SWEEPS, SWEEP_TOL)
    COUNTER.add(phase)
    return beta, n_sweeps, converged


def _fit_window(dataset, s, e, lam, warm_start=None, phase="solve"):
    """Windowed solve on a dataset, using its Gram prefix table if available."""
    prefix = dataset.gram_prefix()
    if prefix is None:
        return _fit_arrays(dataset.XT, dataset.y, s, e, lam, warm_start, phase)
    P, cxy = prefix
    G = P[e] - P[s]
    c = cxy[e] - cxy[s]
    beta = (np.zeros(dataset.p) if warm_start is None
            else np.array(warm_start, dtype=np.float64))
    lam_scaled = lam * np.sqrt(e - s)
    n_sweeps, converged = _cd_sweeps_gram(G, c, lam_scaled, beta, MAX_SWEEPS, SWEEP_TOL)
    COUNTER.add(phase)
    return beta, n_sweeps, converged


def objective_value(XT, y, s, e, lam, beta) -> float:
    resid = y[s:e] - beta @ XT[:, s:e]
    return float(resid @ resid + lam * np.sqrt(e - s) * np.abs(beta).sum())


def solve(dataset, problem: LassoProblem, warm_start=None, phase="solve") -> LassoFit:
    """Solve the windowed Lasso problem.

    Parameters
    ----------
    dataset : Dataset
    problem : LassoProblem
    warm_start : ndarray of shape (p,), optional
        Starting value for the coordinate sweeps.  The solution (a
        stationary point of the convex objective) does not depend on it.

    Returns
    -------
    LassoFit
        Coefficients on the original variable scale, the objective value at
        those coefficients, sweep count, and convergence flag.
    """
    problem.validate(dataset.n)
    if warm_start is not None and len(warm_start) != dataset.p:
        raise ValueError("warm_start length does not match p")
    s, e = problem.window_start, problem.window_end

    if not problem.standardize and not problem.intercept:
        beta, n_sweeps, converged = _fit_window(
            dataset, s, e, problem.lam, warm_start, phase
        )
        obj = objective_value(dataset.XT, dataset.y, s, e, problem.lam, beta)
        return LassoFit(beta, 0.0, obj, n_sweeps, converged)

    Xw = dataset.X[s:e].copy()
    yw = dataset.y[s:e].copy()
    x_mean = np.zeros(dataset.p)
    y_mean = 0.0
    if problem.intercept:
        x_mean = Xw.mean(axis=0)
        y_mean = float(yw.mean())
        Xw -= x_mean
        yw -= y_mean
    sd = np.ones(dataset.p)
    if problem.standardize:
        sd = Xw.std(axis=0)
        # numerically constant columns have sd ~ machine epsilon, not 0
        live = sd > 1e-12 * (1.0 + np.abs(Xw.mean(axis=0)))
        Xw[:, live] /= sd[live]
        Xw[:, ~live] = 0.0
        sd[~live] = 1.0
    warm = None if warm_start is None else np.asarray(warm_start) * sd
    XTw = np.ascontiguousarray(Xw.T)
    beta_std, n_sweeps, converged = _fit_arrays(
        XTw, yw, 0, e - s, problem.lam, warm, phase
    )
    beta = beta_std / sd
    intercept_value = y_mean - float(x_mean @ beta) if problem.intercept else 0.0
    obj = objective_value(dataset.XT, dataset.y, s, e, problem.lam, beta)
    return LassoFit(beta, intercept_value, obj, n_sweeps, converged)


def lambda_max(dataset, s: int, e: int) -> float:
    """Smallest penalty at which the windowed solve returns the zero vector.

    Equals ``max_j |2 sum_{t in (s,e]} x_{jt} Y_t| / sqrt(e - s)`` under this
    module's objective scaling.  When the dataset carries a Gram prefix
    table, the sums are taken from it so the boundary is exact against the
    solver's own arithmetic.
    """
    if not (0 <= s < e <= dataset.n) or e - s < 2:
        raise ValueError(f"window ({s}, {e}] invalid for n={dataset.n}")
    prefix = dataset.gram_prefix()
    if prefix is not None:
        grad0 = 2.0 * (prefix[1][e] - prefix[1][s])
    else:
        grad0 = 2.0 * (dataset.XT[:, s:e] @ dataset.y[s:e])
    return float(np.abs(grad0).max() / np.sqrt(e - s))


def kkt_max_violation(dataset, problem: LassoProblem, fit: LassoFit) -> float:
    """Worst violation of the subgradient optimality conditions at ``fit``.

    For active coordinates the stationarity residual
    ``|2 x_j'(y - X beta) - lam sqrt(e-s) sign(beta_j)|`` must vanish; for
    inactive ones ``|2 x_j'(y - X beta)|`` may not exceed the penalty.
    Returns the largest excess over these bounds (0 means KKT holds exactly).
    Only meaningful for plain fits (no standardization or intercept).
    """
    s, e = problem.window_start, problem.window_end
    lam_scaled = problem.lam * np.sqrt(e - s)
    resid = dataset.y[s:e] - fit.beta @ dataset.XT[:, s:e]
    grad = 2.0 * (dataset.XT[:, s:e] @ resid)
    active = fit.beta != 0
    viol = np.abs(grad - lam_scaled * np.sign(fit.beta)) * active
    viol_inactive = np.maximum(np.abs(grad) - lam_scaled, 0.0) * (~active)
    return float(np.maximum(viol, viol_inactive).max())


def kkt_tolerance(dataset, problem: LassoProblem) -> float:
    """Tolerance for :func:`kkt_max_violation`: ``1e-6 * (1 + scale)``.

    The scale is the gradient magnitude at the origin plus the scaled
    penalty, the natural size of the quantities entering the conditions.
    """
    s, e = problem.window_start, problem.window_end
    grad0 = 2.0 * (dataset.XT[:, s:e] @ dataset.y[s:e])
    scale = np.abs(grad0).max() + problem.lam * np.sqrt(e - s)
    return 1e-6 * (1.0 + scale)
