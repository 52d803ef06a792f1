"""Independent reference implementations used only to check the package.

Nothing here shares code with the solvers under test: the Lasso oracle is a
proximal subgradient-descent loop, the detector oracle evaluates the
population quantity directly from the generating coefficients, and the
two-sided objective is the literal double sum.
"""

import numpy as np


def prox_subgradient_lasso(X, y, lam_scaled, max_iters=200_000, tol=1e-14):
    """Minimise ``||y - X b||^2 + lam_scaled * |b|_1`` by subgradient steps
    on the smooth part followed by the l1 proximal map, with a fixed step
    below the curvature bound.  Slow but independent of coordinate descent.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    p = X.shape[1]
    step = 1.0 / (2.0 * np.linalg.eigvalsh(X.T @ X).max() + 1e-12)
    thresh = step * lam_scaled
    beta = np.zeros(p)
    obj_prev = np.inf
    for it in range(max_iters):
        grad = -2.0 * X.T @ (y - X @ beta)
        z = beta - step * grad
        beta = np.sign(z) * np.maximum(np.abs(z) - thresh, 0.0)
        if it % 50 == 0:
            resid = y - X @ beta
            obj = resid @ resid + lam_scaled * np.abs(beta).sum()
            if obj_prev - obj < tol * (1.0 + abs(obj)):
                break
            obj_prev = obj
    return beta


def lasso_objective(X, y, lam_scaled, beta):
    resid = y - X @ beta
    return float(resid @ resid + lam_scaled * np.abs(beta).sum())


def population_mixture(betas, change_points, n, s, e):
    """Length-weighted average of segment coefficients over the window
    ``(s, e]`` of a piecewise design with the given 1-based change points."""
    betas = np.atleast_2d(betas)
    edges = [0] + list(change_points) + [n]
    out = np.zeros(betas.shape[1])
    for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        overlap = max(0, min(e, hi) - max(s, lo))
        out += overlap * betas[j]
    return out / (e - s)


def population_detector(betas, change_points, n, G, k):
    """sqrt(G/2) times the distance between the two adjacent population
    mixtures at k; reduces to the triangular shape around an isolated
    change and to zero far from all changes."""
    left = population_mixture(betas, change_points, n, k - G, k)
    right = population_mixture(betas, change_points, n, k, k + G)
    return np.sqrt(G / 2.0) * np.linalg.norm(right - left)


def naive_q(dataset, k, a, b, gamma_left, gamma_right):
    """Literal double sum defining the two-sided residual objective."""
    total = 0.0
    for t in range(a, k):
        r = dataset.y[t] - dataset.X[t] @ gamma_left
        total += r * r
    for t in range(k, b):
        r = dataset.y[t] - dataset.X[t] @ gamma_right
        total += r * r
    return total


def brute_force_local_maximisers(points, values, threshold, width):
    """Accepted grid points by direct evaluation of the rule: value above
    the threshold and no strictly larger value (nor an equal value at a
    smaller index) among grid points within ``(k - width, k + width]``."""
    out = []
    for i, k in enumerate(points):
        if not values[i] > threshold:
            continue
        ok = True
        for j, other in enumerate(points):
            if k - width + 1 <= other <= k + width:
                if values[j] > values[i] or (values[j] == values[i] and other < k):
                    ok = False
                    break
        if ok:
            out.append(int(k))
    return out
