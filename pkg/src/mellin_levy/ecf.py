"""Empirical characteristic function and its first two u-derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SmallDenominatorError", "EcfBatch", "ecf_eval", "denominator_guard", "log_cf_derivatives"]

# elements of the (grid x sample) work array per chunk
_CHUNK_ELEMENTS = 1 << 21


class SmallDenominatorError(ArithmeticError):
    """``|Phi_n(u)|`` fell below the guard threshold."""

    def __init__(self, u, modulus, guard):
        self.u = u
        self.modulus = modulus
        self.guard = guard
        super().__init__(f"|Phi_n({u:.6g})| = {modulus:.3e} is not above the guard {guard:.3e}")


@dataclass(frozen=True)
class EcfBatch:
    u: np.ndarray
    phi: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    n: int


def _observations(path_or_obs) -> np.ndarray:
    obs = getattr(path_or_obs, "observations", path_or_obs)
    obs = np.ascontiguousarray(obs, dtype=float)
    if obs.ndim != 1 or obs.size == 0:
        raise ValueError("need a non-empty one-dimensional sample")
    return obs


def ecf_eval(path_or_obs, u):
    """``Phi_n(u)``, ``Phi_n'(u)``, ``Phi_n''(u)`` as exact sample means.

    ``Phi_n(u) = mean(e^{iuZ})``, ``Phi_n' = mean(iZ e^{iuZ})``,
    ``Phi_n'' = mean(-Z^2 e^{iuZ})``. Each grid point is reduced along a
    contiguous row, so numpy's pairwise summation applies and a batch
    result equals the pointwise one.

    Returns an :class:`EcfBatch` for array ``u`` and a tuple of three
    complex numbers for scalar ``u``.
    """
    z = _observations(path_or_obs)
    scalar = np.ndim(u) == 0
    uu = np.asarray(u, dtype=float).ravel()
    n = z.size
    z2 = z * z
    phi = np.empty(uu.size, dtype=np.complex128)
    d1 = np.empty_like(phi)
    d2 = np.empty_like(phi)
    rows = max(1, _CHUNK_ELEMENTS // n)
    for lo in range(0, uu.size, rows):
        arg = uu[lo : lo + rows, None] * z[None, :]
        c = np.cos(arg)
        s = np.sin(arg)
        # e^{iuZ} = c + i s; iZ e^{iuZ} = -Z s + i Z c; -Z^2 e^{iuZ} = -Z^2 c - i Z^2 s
        phi[lo : lo + rows] = (c.sum(axis=1) + 1j * s.sum(axis=1)) / n
        d1[lo : lo + rows] = (-(s * z).sum(axis=1) + 1j * (c * z).sum(axis=1)) / n
        d2[lo : lo + rows] = (-(c * z2).sum(axis=1) - 1j * (s * z2).sum(axis=1)) / n
    if scalar:
        return complex(phi[0]), complex(d1[0]), complex(d2[0])
    shape = np.shape(u)
    return EcfBatch(uu.reshape(shape), phi.reshape(shape), d1.reshape(shape), d2.reshape(shape), n)


def denominator_guard(n: int) -> float:
    """Lower bound required of ``|Phi_n|``: ``max(log(n) / sqrt(n), 1e-6)``."""
    return max(np.log(n) / np.sqrt(n), 1e-6) if n > 1 else 1e-6


def log_cf_derivatives(phi, d1, d2, sigma2_l2=0.0, guard=0.0, u=None):
    """``(Psi_n'(u), Psi_{sigma,n}''(u))`` from ECF values.

    ``Psi_n' = Phi'/Phi`` and ``Psi_{sigma,n}'' = Phi''/Phi - (Phi'/Phi)^2
    + sigma2_l2`` where ``sigma2_l2 = sigma^2 ||K||_2^2``.

    Raises :class:`SmallDenominatorError` at the first point with
    ``|Phi| <= guard``.
    """
    phi = np.asarray(phi)
    mod = np.abs(phi)
    bad = mod <= guard
    if np.any(bad):
        i = int(np.flatnonzero(np.atleast_1d(bad))[0])
        where = np.atleast_1d(u)[i] if u is not None else float("nan")
        raise SmallDenominatorError(float(where), float(np.atleast_1d(mod)[i]), guard)
    r1 = np.asarray(d1) / phi
    r2 = np.asarray(d2) / phi - r1 * r1 + sigma2_l2
    if r1.ndim == 0:
        return complex(r1), complex(r2)
    return r1, r2
