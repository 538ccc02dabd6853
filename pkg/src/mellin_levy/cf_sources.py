"""Sources of characteristic-function values for the Mellin estimators.

An estimator only needs ``Phi``, ``Phi'`` and ``Phi''`` on quadrature
nodes, the mean of Z and (for the denominator guard) a sample size.
:class:`EmpiricalCF` supplies them from observations; :class:`ExactCF`
supplies the model values so that the same estimator code can be run on
exact inputs.
"""

from __future__ import annotations

import numpy as np

from .ecf import denominator_guard, ecf_eval
from .levy_models import ExponentialCPP, LevyTriplet, big_psi, big_psi_derivatives

__all__ = ["EmpiricalCF", "ExactCF", "as_cf_source"]


class EmpiricalCF:
    """Empirical characteristic function of a sample path."""

    def __init__(self, path_or_obs):
        obs = getattr(path_or_obs, "observations", path_or_obs)
        self.observations = np.ascontiguousarray(obs, dtype=float)
        if self.observations.ndim != 1 or self.observations.size == 0:
            raise ValueError("need a non-empty one-dimensional sample")
        self.n = self.observations.size
        self.mean = float(np.mean(self.observations))
        self.guard = denominator_guard(self.n)

    def values(self, u):
        b = ecf_eval(self.observations, np.asarray(u, dtype=float))
        return b.phi, b.d1, b.d2


class ExactCF:
    """Model characteristic function ``Phi = exp(Psi)`` of the MA process.

    Uses the closed form for the exponential kernel with exponential
    compound Poisson jumps and quadrature of ``psi(u K(s))`` otherwise.
    """

    guard = 0.0
    n = None

    def __init__(self, model: LevyTriplet, kernel):
        self.model = model
        self.kernel = kernel
        self.mean = float(model.mean() * kernel.l1_norm())
        self._closed = (
            getattr(kernel, "r", None) == 0
            and not kernel.one_sided
            and (model.jumps is None or isinstance(model.jumps, ExponentialCPP))
        )

    def log_derivatives(self, u):
        """``(Psi(u), Psi'(u), Psi''(u))`` including the Gaussian and drift parts."""
        u = np.asarray(u, dtype=float)
        m, k = self.model, self.kernel
        if self._closed:
            lam = 0.0 if m.jumps is None else m.jumps.intensity
            a = 2.0 * lam / k.rho
            l1, l2 = k.l1_norm(), k.l2_norm_sq()
            w = 1.0 - 1j * u
            p0 = -a * np.log(w) + 1j * u * m.drift * l1 - 0.5 * m.sigma2 * l2 * u**2
            p1 = 1j * a / w + 1j * m.drift * l1 - m.sigma2 * l2 * u
            p2 = -a / w**2 - m.sigma2 * l2
            return p0, p1, p2
        flat = np.atleast_1d(u)
        p0 = np.array([big_psi(m, k, float(x)) for x in flat])
        d = np.array([big_psi_derivatives(m, k, float(x)) for x in flat])
        return p0.reshape(u.shape), d[:, 0].reshape(u.shape), d[:, 1].reshape(u.shape)

    def values(self, u):
        p0, p1, p2 = self.log_derivatives(u)
        phi = np.exp(p0)
        return phi, p1 * phi, (p2 + p1 * p1) * phi


def as_cf_source(source):
    """Wrap a path or observation array in :class:`EmpiricalCF`; pass sources through."""
    if hasattr(source, "values") and hasattr(source, "mean"):
        return source
    return EmpiricalCF(source)
