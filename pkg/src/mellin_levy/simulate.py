"""Simulation of Z_t = int K(t - s) dL_s on an equidistant grid.

The driver is a two-sided compound Poisson process with standard
exponential jumps (plus an optional Brownian part). Jumps at positive times
come from one Poisson stream; jumps at negative times ``-s`` from an
independent one. Kernel contributions are truncated at the radius
``x_max`` beyond which ``K <= alpha``.

Random streams are spawned from a single ``numpy.random.SeedSequence``:
stream 0 positive-side jump times, stream 1 negative-side jump times,
stream 2 jump sizes, stream 3 the Gaussian component.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg

from .kernels import GammaExpKernel
from .levy_models import ExponentialCPP, LevyTriplet

__all__ = [
    "NonPositiveDefiniteError",
    "SamplePath",
    "simulate_path",
    "export_path",
    "load_path",
    "gaussian_ma_component",
]

# above this size the Gaussian part uses circulant embedding instead of a dense Cholesky factor
CHOLESKY_MAX_N = 2048


class NonPositiveDefiniteError(np.linalg.LinAlgError):
    """Autocovariance matrix (or its circulant embedding) is not positive semidefinite."""


@dataclass(frozen=True)
class SamplePath:
    """Observations ``Z_delta, ..., Z_{n delta}``."""

    delta: float
    observations: np.ndarray
    seed: int | None = None
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim != 1 or obs.size < 1:
            raise ValueError("a sample path needs at least one observation")
        if not np.all(np.isfinite(obs)):
            raise ValueError("observations must be finite")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        obs.setflags(write=False)
        object.__setattr__(self, "observations", obs)

    @property
    def n(self) -> int:
        return self.observations.size

    @property
    def times(self) -> np.ndarray:
        return self.delta * np.arange(1, self.n + 1)

    def __eq__(self, other):
        if not isinstance(other, SamplePath):
            return NotImplemented
        return self.delta == other.delta and np.array_equal(self.observations, other.observations)


def _poisson_times(rng: np.random.Generator, rate: float, length: float) -> np.ndarray:
    """Arrival times of a rate-``rate`` Poisson process on ``(0, length)``."""
    if rate == 0 or length <= 0:
        return np.empty(0)
    times = []
    t = 0.0
    block = max(16, int(rate * length * 1.1) + 16)
    while True:
        gaps = rng.exponential(1.0 / rate, size=block)
        arr = t + np.cumsum(gaps)
        if arr[-1] >= length:
            times.append(arr[arr < length])
            break
        times.append(arr)
        t = arr[-1]
        block = max(16, int(rate * (length - t) * 1.1) + 16)
    return np.concatenate(times)


def _accumulate(z, kernel, grid_times, delta, jump_times, sizes, x_max, sign):
    """Add ``sign * sum_j K(t_k - s_j) xi_j`` over jumps with ``|t_k - s_j| < x_max``."""
    if jump_times.size == 0:
        return
    n = z.size
    # grid index k (0-based) corresponds to time (k + 1) * delta
    first = np.ceil((jump_times - x_max) / delta).astype(np.int64) - 1
    span = int(np.ceil(2 * x_max / delta)) + 2
    for off in range(span + 1):
        k = first + off
        ok = (k >= 0) & (k < n)
        if not np.any(ok):
            continue
        kk = k[ok]
        lag = grid_times[kk] - jump_times[ok]
        inside = np.abs(lag) < x_max
        if not np.any(inside):
            continue
        contrib = kernel.eval(lag[inside]) * sizes[ok][inside]
        z += sign * np.bincount(kk[inside], weights=contrib, minlength=n)


def gaussian_ma_component(kernel, sigma2: float, delta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact draw of ``(sigma W-integral of K)`` at ``delta, ..., n delta``.

    The stationary autocovariance is ``sigma2 * (K*K)(delta * lag)``. Small
    ``n`` use a Cholesky factor of the Toeplitz matrix; large ``n`` use
    circulant embedding, which is exact whenever the embedding is
    nonnegative definite.
    """
    acov = sigma2 * kernel.autoconvolution(delta * np.arange(n))
    if n <= CHOLESKY_MAX_N:
        try:
            chol = linalg.cholesky(linalg.toeplitz(acov), lower=True)
        except linalg.LinAlgError as exc:
            raise NonPositiveDefiniteError(str(exc)) from exc
        return chol @ rng.standard_normal(n)
    m = 2 * (n - 1)
    row = np.concatenate([acov, acov[-2:0:-1]])
    eig = np.fft.fft(row).real
    if eig.min() < -1e-10 * eig.max():
        raise NonPositiveDefiniteError(f"circulant embedding has eigenvalue {eig.min():.3e}")
    eig = np.clip(eig, 0.0, None)
    xi = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    field_ = np.fft.fft(np.sqrt(eig / m) * xi)
    return field_.real[:n]


def simulate_path(
    model: LevyTriplet,
    kernel: GammaExpKernel,
    delta: float,
    n: int,
    alpha: float = 0.01,
    seed: int = 0,
    x_max: float | None = None,
    negative_side_sign: float = 1.0,
) -> SamplePath:
    """Simulate ``Z_{k delta}``, ``k = 1..n``.

    Parameters
    ----------
    model : LevyTriplet
        Must have :class:`ExponentialCPP` jumps (or none). The drift adds
        ``drift * ||K||_1`` to every observation.
    kernel : GammaExpKernel
    delta, n : grid step and number of observations.
    alpha : float
        Truncation level; contributions with ``K <= alpha`` are dropped.
    seed : int
        Root seed of all random streams.
    x_max : float, optional
        Overrides the truncation radius derived from ``alpha``.
    negative_side_sign : float
        Sign applied to the contribution of jumps at negative times. ``+1``
        gives the stationary process; ``-1`` reproduces the alternative
        sign convention ``Z = sum K(t - s) xi - sum K(t + s') xi'``.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    jumps = model.jumps
    if jumps is not None and not isinstance(jumps, ExponentialCPP):
        raise ValueError("only exponential compound Poisson drivers can be simulated")
    lam = 0.0 if jumps is None else jumps.intensity
    if x_max is None:
        x_max = kernel.truncation_radius(alpha)
    elif not x_max > 0:
        raise ValueError(f"x_max must be positive, got {x_max}")

    ss = np.random.SeedSequence(seed)
    rng_pos, rng_neg, rng_size, rng_gauss = (np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(4))

    grid_times = delta * np.arange(1, n + 1)
    z = np.zeros(n)
    pos_times = _poisson_times(rng_pos, lam, n * delta + x_max)
    # negative side only reaches t < x_max
    neg_times = _poisson_times(rng_neg, lam, x_max)
    sizes = rng_size.exponential(1.0, size=pos_times.size + neg_times.size)
    _accumulate(z, kernel, grid_times, delta, pos_times, sizes[: pos_times.size], x_max, 1.0)
    _accumulate(z, kernel, grid_times, delta, -neg_times, sizes[pos_times.size :], x_max, negative_side_sign)

    if model.drift:
        z += model.drift * kernel.l1_norm()
    if model.sigma2 > 0:
        z += gaussian_ma_component(kernel, model.sigma2, delta, n, rng_gauss)

    provenance = {
        "lambda": lam,
        "sigma2": model.sigma2,
        "drift": model.drift,
        "kernel_r": kernel.r,
        "kernel_rho": kernel.rho,
        "one_sided": kernel.one_sided,
        "alpha": alpha,
        "x_max": x_max,
        "negative_side_sign": negative_side_sign,
        "jumps_pos": int(pos_times.size),
        "jumps_neg": int(neg_times.size),
    }
    return SamplePath(delta=float(delta), observations=z, seed=seed, provenance=provenance)


def export_path(path: SamplePath, destination) -> None:
    """Write ``k,t,z`` rows (17 significant digits) to a CSV file."""
    with open(destination, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "t", "z"])
        for k, (t, z) in enumerate(zip(path.times, path.observations), start=1):
            w.writerow([k, repr(float(t)), repr(float(z))])


def load_path(source) -> SamplePath:
    """Read a path written by :func:`export_path`."""
    with open(source, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{source}: no observations")
    k = np.array([int(r["k"]) for r in rows])
    t = np.array([float(r["t"]) for r in rows])
    z = np.array([float(r["z"]) for r in rows])
    return SamplePath(delta=float(t[0] / k[0]), observations=z, provenance={"source": str(Path(source))})
