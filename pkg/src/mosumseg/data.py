"""Dataset container and CSV input/output.

A dataset is a response vector ``y`` of length ``n`` together with a design
matrix ``X`` of shape ``(n, p)``.  Throughout the package, windows are
half-open on the left: the window ``(s, e]`` in 1-based sample time maps to
the row slice ``X[s:e]``.  A change point location ``k`` therefore means that
rows ``X[:k]`` belong to the left regime and rows ``X[k:]`` to the right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised for unusable input data (wrong shape, non-finite values, bad CSV)."""


@dataclass(frozen=True)
class Dataset:
    """Response vector and design matrix, with optional column names.

    Attributes
    ----------
    y : ndarray of shape (n,)
        Response.
    X : ndarray of shape (n, p)
        Covariates, one row per observation.
    columns : list of str
        Covariate names; defaults to ``x1..xp``.
    """

    y: np.ndarray
    X: np.ndarray
    columns: list[str] = field(default_factory=list)

    def __post_init__(self):
        y = np.ascontiguousarray(np.asarray(self.y, dtype=np.float64))
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if y.ndim != 1:
            raise DataError(f"y must be one-dimensional, got shape {y.shape}")
        if X.shape[0] != y.shape[0]:
            raise DataError(
                f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
            )
        if not np.isfinite(y).all() or not np.isfinite(X).all():
            raise DataError("dataset contains non-finite values")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", np.ascontiguousarray(X))
        if not self.columns:
            object.__setattr__(
                self, "columns", [f"x{i + 1}" for i in range(X.shape[1])]
            )
        elif len(self.columns) != X.shape[1]:
            raise DataError("number of column names does not match X")
        # row-major transpose: each covariate column becomes a contiguous row,
        # which is what the windowed solver kernels iterate over
        object.__setattr__(self, "XT", np.ascontiguousarray(self.X.T))
        object.__setattr__(self, "_prefix", None)

    # prefix sums of x_t x_t' and x_t y_t let any window's Gram matrix and
    # gradient come out as two array differences
    _PREFIX_BUDGET_BYTES = 400_000_000

    def gram_prefix(self):
        """``(P, c)`` with ``P[t] = sum_{u<t} x_u x_u'`` and
        ``c[t] = sum_{u<t} x_u y_u``; ``None`` when the table would be too big."""
        if self._prefix is None:
            n, p = self.X.shape
            if (n + 1) * p * p * 8 > self._PREFIX_BUDGET_BYTES:
                return None
            P = np.zeros((n + 1, p, p))
            np.cumsum(self.X[:, :, None] * self.X[:, None, :], axis=0, out=P[1:])
            c = np.zeros((n + 1, p))
            np.cumsum(self.X * self.y[:, None], axis=0, out=c[1:])
            object.__setattr__(self, "_prefix", (P, c))
        return self._prefix

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def scale_columns(self) -> "Dataset":
        """Divide each covariate column by its full-sample standard deviation.

        Zero-variance columns are left untouched.
        """
        sd = self.X.std(axis=0)
        sd = np.where(sd > 0, sd, 1.0)
        return Dataset(self.y.copy(), self.X / sd, list(self.columns))


def save_csv(path, dataset: Dataset, header: bool = True) -> None:
    """Write a dataset as CSV: first column ``y``, then the covariates.

    Values are serialized with 17 significant digits so a read-back
    reproduces the float64 payload exactly.
    """
    with open(path, "w") as fh:
        if header:
            fh.write(",".join(["y"] + list(dataset.columns)) + "\n")
        for t in range(dataset.n):
            row = [dataset.y[t]] + list(dataset.X[t])
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_csv(path, header: bool = True) -> Dataset:
    """Read a dataset written by :func:`save_csv` (or any conforming CSV).

    The first column is the response; remaining columns are covariates.
    Malformed rows raise :class:`DataError` with the offending location.
    """
    columns: list[str] = []
    rows: list[list[float]] = []
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataError(f"{path}: empty file")
    start = 0
    if header:
        columns = [c.strip() for c in lines[0].split(",")][1:]
        start = 1
    width = None
    for i, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataError(f"{path}: row {i} has {len(cells)} cells, expected {width}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            bad = next(j for j, c in enumerate(cells) if not _is_float(c))
            raise DataError(f"{path}: row {i}, column {bad + 1}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=np.float64)
    if arr.shape[1] < 2:
        raise DataError(f"{path}: need at least a response and one covariate column")
    return Dataset(arr[:, 0], arr[:, 1:], columns)


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def save_truth_sidecar(path, change_points, betas, seed) -> None:
    """JSON sidecar recording the generating truth of a simulated dataset."""
    payload = {
        "change_points": [int(k) for k in change_points],
        "betas": [list(map(float, b)) for b in np.atleast_2d(betas)],
        "seed": int(seed),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
