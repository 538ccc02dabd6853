"""Lévy triplets, characteristic exponents and transforms of the jump density.

Jump measures live on the positive half-line. Two families are available:
:class:`ExponentialCPP` (compound Poisson with standard exponential jumps)
and :class:`TemperedStable`. Both have finite variation, so the exponent is
written without the small-jump compensator:

    psi(u) = i u gamma - sigma^2 u^2 / 2 + int (e^{iux} - 1) nu(x) dx,

with ``gamma`` the genuine drift.

Throughout, ``nu_bar(x) = x**2 * nu(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate
from scipy.special import gamma as real_gamma

from .special import complex_gamma, complex_pow

__all__ = [
    "DomainError",
    "QuadratureError",
    "ExponentialCPP",
    "TemperedStable",
    "LevyTriplet",
    "psi",
    "psi_derivatives",
    "big_psi",
    "big_psi_derivatives",
    "mellin_nu_bar",
    "mellin_x_nu",
    "fourier_nu_bar",
]


class DomainError(ValueError):
    """Argument outside the analyticity strip of a transform."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


def _out(x):
    return complex(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class ExponentialCPP:
    """Compound Poisson jumps with density ``intensity * exp(-x)``, ``x >= 0``."""

    intensity: float = 1.0

    def __post_init__(self):
        if not self.intensity >= 0:
            raise ValueError(f"intensity must be nonnegative, got {self.intensity}")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.intensity * np.exp(-np.abs(x)), 0.0)

    def nu_bar(self, x):
        x = np.asarray(x, dtype=float)
        return x**2 * self.density(x)

    def second_moment(self) -> float:
        return 2.0 * self.intensity

    def mean_jump_rate(self) -> float:
        """``int x nu(x) dx``, the mean of L_1 without drift."""
        return self.intensity

    def _check_u(self, u):
        if np.any(np.imag(u) <= -1.0):
            raise DomainError("exponential jumps need Im(u) > -1")

    def exponent(self, u):
        return self.intensity * (1.0 / (1.0 - 1j * u) - 1.0)

    def exponent_d1(self, u):
        return 1j * self.intensity / (1.0 - 1j * u) ** 2

    def exponent_d2(self, u):
        return -2.0 * self.intensity / (1.0 - 1j * u) ** 3

    def mellin_nu_bar(self, z):
        if np.any(np.real(z) <= -2.0):
            raise DomainError("Mellin transform of x^2 nu needs Re(z) > -2")
        return self.intensity * complex_gamma(np.asarray(z) + 2.0)

    def mellin_x_nu(self, z):
        if np.any(np.real(z) <= -1.0):
            raise DomainError("Mellin transform of x nu needs Re(z) > -1")
        return self.intensity * complex_gamma(np.asarray(z) + 1.0)

    def fourier_nu_bar(self, u):
        return 2.0 * self.intensity / (1.0 - 1j * np.asarray(u)) ** 3


@dataclass(frozen=True)
class TemperedStable:
    """Jump density ``x**(-eta-1) * exp(-lam * x)``, ``x > 0``, ``0 < eta < 1``."""

    eta: float = 0.5
    lam: float = 1.0

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x > 0, np.abs(x) ** (-self.eta - 1) * np.exp(-self.lam * np.abs(x)), 0.0)
        return out

    def nu_bar(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(invalid="ignore"):
            return np.where(x > 0, np.abs(x) ** (1 - self.eta) * np.exp(-self.lam * np.abs(x)), 0.0)

    def second_moment(self) -> float:
        return real_gamma(2 - self.eta) * self.lam ** (self.eta - 2)

    def mean_jump_rate(self) -> float:
        return real_gamma(1 - self.eta) * self.lam ** (self.eta - 1)

    def _check_u(self, u):
        if np.any(np.imag(u) <= -self.lam):
            raise DomainError("tempered stable jumps need Im(u) > -lam")

    def exponent(self, u):
        eta, lam = self.eta, self.lam
        return real_gamma(-eta) * (complex_pow(lam - 1j * np.asarray(u), eta) - lam**eta)

    def exponent_d1(self, u):
        eta, lam = self.eta, self.lam
        return 1j * real_gamma(1 - eta) * complex_pow(lam - 1j * np.asarray(u), eta - 1)

    def exponent_d2(self, u):
        return -self.fourier_nu_bar(u)

    def mellin_nu_bar(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if np.any(z.real <= self.eta - 1):
            raise DomainError(f"Mellin transform of x^2 nu needs Re(z) > {self.eta - 1}")
        return complex_pow(self.lam, self.eta - z - 1) * complex_gamma(z - self.eta + 1)

    def mellin_x_nu(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if np.any(z.real <= self.eta):
            raise DomainError(f"Mellin transform of x nu needs Re(z) > {self.eta}")
        return complex_pow(self.lam, self.eta - z) * complex_gamma(z - self.eta)

    def fourier_nu_bar(self, u):
        u = np.asarray(u)
        return real_gamma(2 - self.eta) * complex_pow(self.lam - 1j * u, self.eta - 2)


JumpDensity = Union[ExponentialCPP, TemperedStable]


@dataclass(frozen=True)
class LevyTriplet:
    """Drift, Gaussian variance and jump density of the driving Lévy process."""

    drift: float = 0.0
    sigma2: float = 0.0
    jumps: Optional[JumpDensity] = None

    def __post_init__(self):
        if not self.sigma2 >= 0:
            raise ValueError(f"sigma2 must be nonnegative, got {self.sigma2}")

    def mean(self) -> float:
        """E[L_1]."""
        jm = self.jumps.mean_jump_rate() if self.jumps is not None else 0.0
        return self.drift + jm

    def variance(self) -> float:
        """Var[L_1] = sigma^2 + int x^2 nu(x) dx."""
        jv = self.jumps.second_moment() if self.jumps is not None else 0.0
        return self.sigma2 + jv


def psi(model: LevyTriplet, u):
    """Characteristic exponent of L_1 at (possibly complex) ``u``."""
    u = np.asarray(u, dtype=np.complex128)
    out = 1j * u * model.drift - 0.5 * model.sigma2 * u**2
    if model.jumps is not None:
        model.jumps._check_u(u)
        out = out + model.jumps.exponent(u)
    return _out(out)


def psi_derivatives(model: LevyTriplet, u):
    """``(psi'(u), psi''(u))``."""
    u = np.asarray(u, dtype=np.complex128)
    d1 = 1j * model.drift - model.sigma2 * u
    d2 = -model.sigma2 * np.ones_like(u)
    if model.jumps is not None:
        model.jumps._check_u(u)
        d1 = d1 + model.jumps.exponent_d1(u)
        d2 = d2 + model.jumps.exponent_d2(u)
    return _out(d1), _out(d2)


def _kernel_support(kernel):
    # effective support of the kernel for quadrature, plus breakpoints
    if hasattr(kernel, "rho"):
        x_hi = kernel.r / kernel.rho + 50.0 * (1 + kernel.r) / kernel.rho
        lo = 0.0 if kernel.one_sided else -x_hi
        pts = [0.0] if kernel.r == 0 or not kernel.one_sided else []
        return lo, x_hi, pts
    return kernel.lower, kernel.upper, []


def _quad_c(f, a, b, points, tol):
    opts = dict(limit=500, epsabs=tol, epsrel=1e-12)
    if points:
        opts["points"] = [p for p in points if a < p < b]
    with np.errstate(all="ignore"):
        re, e1 = integrate.quad(lambda s: np.real(f(s)), a, b, **opts)
        im, e2 = integrate.quad(lambda s: np.imag(f(s)), a, b, **opts)
    if not (np.isfinite(re) and np.isfinite(im)) or e1 + e2 > 100 * tol:
        raise QuadratureError(f"quadrature error estimate {e1 + e2:.2e} exceeds tolerance")
    return complex(re, im)


def big_psi(model: LevyTriplet, kernel, u: float, tol: float = 1e-10) -> complex:
    """Characteristic exponent of Z_t: the integral of psi(u K(s)) over s."""
    if u == 0:
        return 0j
    a, b, pts = _kernel_support(kernel)
    return _quad_c(lambda s: psi(model, u * kernel.eval(s)), a, b, pts, tol)


def big_psi_derivatives(model: LevyTriplet, kernel, u: float, tol: float = 1e-10):
    """``(Psi'(u), Psi''(u))`` by quadrature of ``psi'(uK) K`` and ``psi''(uK) K^2``."""
    a, b, pts = _kernel_support(kernel)

    def d1(s):
        k = kernel.eval(s)
        return psi_derivatives(model, u * k)[0] * k

    def d2(s):
        k = kernel.eval(s)
        return psi_derivatives(model, u * k)[1] * k * k

    return _quad_c(d1, a, b, pts, tol), _quad_c(d2, a, b, pts, tol)


def mellin_nu_bar(jumps: JumpDensity, z):
    """Mellin transform of ``x**2 * nu(x)``."""
    return _out(jumps.mellin_nu_bar(z))


def mellin_x_nu(jumps: JumpDensity, z):
    """Mellin transform of ``x * nu(x)``; the target of the first-derivative route."""
    return _out(jumps.mellin_x_nu(z))


def fourier_nu_bar(jumps: JumpDensity, u):
    """Fourier transform ``int e^{iux} x^2 nu(x) dx`` for real ``u``."""
    return _out(jumps.fourier_nu_bar(u))
