"""Seedable generators for piecewise linear regression data.

Randomness comes from counter-based Philox streams derived from one 64-bit
seed through ``np.random.SeedSequence``.  The stream layout is fixed:
child 0 drives the covariates, child 1 the noise, child 2 any design draws
(random supports, random change locations), so replications with distinct
seeds are independent and a single run is bit-reproducible.

Presets reproduce the benchmark configurations used throughout the package:
three-regime setups with Toeplitz or identity covariance (``S1``–``S3``),
a six-regime configuration mixing large short-lived and small long-lived
shifts (``S4``), a no-change configuration at a 10x data scale (``S5``),
and heavy-tailed / serially dependent variants (``E_heavy``, ``E_dep``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset

AR_BURN_IN = 100


@dataclass(frozen=True)
class CovarianceSpec:
    """Covariate covariance: ``scale**2 * base`` with identity or Toeplitz
    base ``base[i, j] = rho**|i-j|``."""

    kind: str = "identity"
    rho: float = 0.0
    scale: float = 1.0

    def matrix(self, p: int) -> np.ndarray:
        if self.kind == "identity":
            base = np.eye(p)
        elif self.kind == "toeplitz":
            if not (-1.0 < self.rho < 1.0):
                raise ValueError("toeplitz rho must lie in (-1, 1)")
            idx = np.arange(p)
            base = self.rho ** np.abs(idx[:, None] - idx[None, :])
        else:
            raise ValueError(f"unknown covariance kind {self.kind!r}")
        return (self.scale ** 2) * base


@dataclass(frozen=True)
class NoiseSpec:
    """Noise process: iid gaussian, scaled t5, or AR(1) with gaussian
    innovations.  ``sigma`` is the marginal standard deviation in all three
    cases (AR innovations are shrunk by ``sqrt(1 - phi**2)``)."""

    kind: str = "gaussian"
    sigma: float = 1.0
    phi: float = 0.0


@dataclass(frozen=True)
class SparseBetaSpec:
    """Sparse coefficient pattern: ``sparsity`` nonzero entries, either the
    leading coordinates or a random draw, with constant or alternating
    signs at the given magnitude."""

    sparsity: int
    magnitude: float = 1.0
    support: str = "prefix"
    signs: str = "alternating"

    def build(self, p: int, rng: np.random.Generator | None = None) -> np.ndarray:
        if not (1 <= self.sparsity <= p):
            raise ValueError("sparsity outside [1, p]")
        if self.support == "prefix":
            idx = np.arange(self.sparsity)
        elif self.support == "random":
            if rng is None:
                raise ValueError("random support needs a generator")
            idx = np.sort(rng.choice(p, size=self.sparsity, replace=False))
        else:
            raise ValueError(f"unknown support rule {self.support!r}")
        beta = np.zeros(p)
        if self.signs == "alternating":
            beta[idx] = self.magnitude * (-1.0) ** np.arange(self.sparsity)
        elif self.signs == "constant":
            beta[idx] = self.magnitude
        else:
            raise ValueError(f"unknown sign rule {self.signs!r}")
        return beta


@dataclass(frozen=True)
class SimConfig:
    """Full specification of one simulated dataset."""

    n: int
    p: int
    change_points: tuple[int, ...]
    betas: np.ndarray  # (q + 1, p)
    covariance: CovarianceSpec = CovarianceSpec()
    noise: NoiseSpec = NoiseSpec()
    covariate_process: str = "iid"  # or "ar1"
    covariate_phi: float = 0.0
    covariate_dist: str = "gaussian"  # or "student_t5_scaled"
    seed: int = 0

    @property
    def q(self) -> int:
        return len(self.change_points)

    def __post_init__(self):
        betas = np.atleast_2d(np.asarray(self.betas, dtype=np.float64))
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "change_points",
                           tuple(int(k) for k in self.change_points))
        ks = (0,) + self.change_points + (self.n,)
        if any(nxt <= prev for prev, nxt in zip(ks[:-1], ks[1:])):
            raise ValueError(f"change points {self.change_points} not strictly "
                             f"increasing inside (0, {self.n})")
        if betas.shape != (self.q + 1, self.p):
            raise ValueError(f"betas must have shape ({self.q + 1}, {self.p})")
        for j in range(self.q):
            if np.array_equal(betas[j], betas[j + 1]):
                raise ValueError(f"betas {j} and {j + 1} are identical")

    def jump_sizes(self) -> np.ndarray:
        """L2 norms of consecutive coefficient differences."""
        return np.linalg.norm(np.diff(self.betas, axis=0), axis=1)

    def segment_of(self, t: int) -> int:
        """Segment index of 0-based row ``t``."""
        return int(np.searchsorted(np.asarray(self.change_points), t, side="right"))


def _streams(seed: int):
    kids = np.random.SeedSequence(int(seed)).spawn(3)
    return tuple(np.random.Generator(np.random.Philox(k)) for k in kids)


def design_rng(seed: int) -> np.random.Generator:
    """The design-draw substream (child 2) for the given seed."""
    return _streams(seed)[2]


def _t5_scaled(rng: np.random.Generator, size) -> np.ndarray:
    # Gaussian / chi-square ratio; sqrt(3/5) factor gives unit variance
    z = rng.standard_normal(size)
    v = rng.chisquare(5, size)
    return math.sqrt(3.0 / 5.0) * z / np.sqrt(v / 5.0)


def student_t5_scaled(count: int, seed: int) -> np.ndarray:
    """Unit-variance scaled t draws with 5 degrees of freedom."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    return _t5_scaled(rng, count)


def _innovations(rng, dist, size):
    if dist == "gaussian":
        return rng.standard_normal(size)
    if dist == "student_t5_scaled":
        return _t5_scaled(rng, size)
    raise ValueError(f"unknown innovation distribution {dist!r}")


def generate(config: SimConfig) -> Dataset:
    """Draw one dataset under ``config``; identical seeds give identical bits."""
    rng_x, rng_e, _ = _streams(config.seed)
    n, p = config.n, config.p

    sigma_x = config.covariance.matrix(p)
    chol = np.linalg.cholesky(sigma_x)
    if config.covariate_process == "iid":
        eta = _innovations(rng_x, config.covariate_dist, (n, p))
        X = eta @ chol.T
    elif config.covariate_process == "ar1":
        phi = config.covariate_phi
        if not (-1.0 < phi < 1.0):
            raise ValueError("covariate AR parameter must lie in (-1, 1)")
        eta = _innovations(rng_x, config.covariate_dist, (AR_BURN_IN + n, p))
        innov = eta @ (math.sqrt(1.0 - phi * phi) * chol).T
        X = np.empty((AR_BURN_IN + n, p))
        X[0] = innov[0]
        for t in range(1, AR_BURN_IN + n):
            X[t] = phi * X[t - 1] + innov[t]
        X = X[AR_BURN_IN:]
    else:
        raise ValueError(f"unknown covariate process {config.covariate_process!r}")

    noise = config.noise
    if noise.kind == "gaussian":
        eps = noise.sigma * rng_e.standard_normal(n)
    elif noise.kind == "student_t5_scaled":
        eps = noise.sigma * _t5_scaled(rng_e, n)
    elif noise.kind == "ar1":
        phi = noise.phi
        if not (-1.0 < phi < 1.0):
            raise ValueError("noise AR parameter must lie in (-1, 1)")
        z = rng_e.standard_normal(AR_BURN_IN + n)
        innov = math.sqrt(1.0 - phi * phi) * noise.sigma * z
        eps = np.empty(AR_BURN_IN + n)
        eps[0] = innov[0]
        for t in range(1, AR_BURN_IN + n):
            eps[t] = phi * eps[t - 1] + innov[t]
        eps = eps[AR_BURN_IN:]
    else:
        raise ValueError(f"unknown noise kind {noise.kind!r}")

    y = np.empty(n)
    edges = (0,) + config.change_points + (n,)
    for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        y[lo:hi] = X[lo:hi] @ config.betas[j] + eps[lo:hi]
    return Dataset(y, X)


def preset(name: str, seed: int = 0, **params) -> SimConfig:
    """Named benchmark configuration.

    ``S1(sparsity)``, ``S2(delta)``, ``S3(n)``, ``S4(kappa)``,
    ``S5(sparsity)``, ``E_heavy(delta)``, ``E_dep(delta)``; unknown keyword
    arguments raise.
    """
    makers = {
        "S1": _preset_s1, "S2": _preset_s2, "S3": _preset_s3,
        "S4": _preset_s4, "S5": _preset_s5,
        "E_heavy": _preset_heavy, "E_dep": _preset_dep,
    }
    if name not in makers:
        raise ValueError(f"unknown preset {name!r}; one of {sorted(makers)}")
    return makers[name](seed=seed, **params)


def _preset_s1(seed, sparsity=10):
    base = SparseBetaSpec(sparsity, magnitude=1.0 / math.sqrt(4 * sparsity),
                          support="random", signs="constant")
    b0 = base.build(100, design_rng(seed))
    return SimConfig(
        n=300, p=100, change_points=(100, 200),
        betas=np.stack([b0, -b0, b0]),
        covariance=CovarianceSpec("toeplitz", rho=0.6),
        seed=seed,
    )


def _preset_s2(seed, delta=1.6 * math.sqrt(40)):
    b0 = SparseBetaSpec(10, magnitude=delta / math.sqrt(40)).build(100)
    return SimConfig(
        n=300, p=100, change_points=(100, 200),
        betas=np.stack([b0, -b0, b0]),
        covariance=CovarianceSpec("toeplitz", rho=0.6),
        seed=seed,
    )


def _preset_s3(seed, n=480):
    if n % 4:
        raise ValueError("S3 needs n divisible by 4")
    b0 = SparseBetaSpec(4, magnitude=0.4).build(100)
    return SimConfig(
        n=n, p=100, change_points=(n // 4, n // 2, 3 * n // 4),
        betas=np.stack([b0, -b0, b0, -b0]),
        seed=seed,
    )


def _preset_s4(seed, kappa=1.6):
    u = SparseBetaSpec(10, magnitude=kappa / math.sqrt(10)).build(50)
    factors = [2.0, -2.0, math.sqrt(2), -math.sqrt(2), 1.0, -1.0]
    return SimConfig(
        n=840, p=50, change_points=(60, 120, 240, 360, 600),
        betas=np.stack([f * u for f in factors]),
        seed=seed,
    )


def _preset_s5(seed, sparsity=10):
    base = SparseBetaSpec(sparsity, magnitude=1.0 / math.sqrt(4 * sparsity),
                          support="random", signs="constant")
    b0 = base.build(100, design_rng(seed))
    return SimConfig(
        n=300, p=100, change_points=(),
        betas=b0[None, :],
        covariance=CovarianceSpec("toeplitz", rho=0.6, scale=10.0),
        noise=NoiseSpec("gaussian", sigma=10.0),
        seed=seed,
    )


def _heavy_dep_betas(delta):
    b0 = SparseBetaSpec(2, magnitude=delta / 2.0).build(100)
    return np.stack([b0, -b0, b0])


def _preset_heavy(seed, delta=1.6):
    return SimConfig(
        n=300, p=100, change_points=(100, 200),
        betas=_heavy_dep_betas(delta),
        noise=NoiseSpec("student_t5_scaled"),
        covariate_dist="student_t5_scaled",
        seed=seed,
    )


def _preset_dep(seed, delta=1.6):
    return SimConfig(
        n=300, p=100, change_points=(100, 200),
        betas=_heavy_dep_betas(delta),
        noise=NoiseSpec("ar1", phi=0.3),
        covariate_process="ar1",
        covariate_phi=0.3,
        seed=seed,
    )
