"""Moving-average kernels.

The closed-form family is the gamma-exponential kernel
``K(x) = |x|**r * exp(-rho*|x|)`` (two-sided) or its restriction to
``x >= 0`` (one-sided). :class:`NumericalKernel` wraps an arbitrary
nonnegative function behind the same interface using quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .special import complex_gamma, complex_pow

__all__ = [
    "KernelError",
    "GammaExpKernel",
    "NumericalKernel",
    "exponential_kernel",
]


class KernelError(ValueError):
    """Invalid kernel parameters or arguments outside a kernel operation's domain."""


@dataclass(frozen=True)
class GammaExpKernel:
    """Gamma-exponential kernel ``|x|**r * exp(-rho*|x|)``.

    Parameters
    ----------
    r : int
        Nonnegative integer power.
    rho : float
        Positive decay rate.
    one_sided : bool
        If true the kernel vanishes for ``x < 0``.
    """

    r: int = 0
    rho: float = 1.0
    one_sided: bool = False
    # I1 = I3 tail coefficients C(r,m) (r+m)! / (2 rho)^(r+m+1), indexed by m
    _tail_coef: np.ndarray = field(init=False, repr=False, compare=False)
    # middle piece I2 = e^{-rho t} t^(2r+1) (r!)^2 / (2r+1)!
    _mid_coef: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 0:
            raise KernelError(f"r must be a nonnegative integer, got {self.r}")
        if not self.rho > 0:
            raise KernelError(f"rho must be positive, got {self.rho}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "rho", float(self.rho))
        r, rho = self.r, self.rho
        coef = np.array(
            [comb(r, m) * factorial(r + m) / (2.0 * rho) ** (r + m + 1) for m in range(r + 1)]
        )
        object.__setattr__(self, "_tail_coef", coef)
        object.__setattr__(self, "_mid_coef", factorial(r) ** 2 / factorial(2 * r + 1))

    @property
    def sidedness(self) -> str:
        return "one-sided" if self.one_sided else "two-sided"

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Kernel value at ``x`` (scalar or array)."""
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(over="ignore"):
            out = ax**self.r * np.exp(-self.rho * ax) if self.r else np.exp(-self.rho * ax)
        if self.one_sided:
            out = np.where(x < 0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    @property
    def max_value(self) -> float:
        if self.r == 0:
            return 1.0
        xm = self.r / self.rho
        return xm**self.r * np.exp(-self.r)

    def integral_pow(self, z):
        """Closed form of the integral of ``K(x)**z`` over the real line.

        Equal to ``s * Gamma(r z + 1) * (rho z)**(-(r z + 1))`` with ``s = 2``
        for the two-sided kernel and ``s = 1`` for the one-sided one. Requires
        ``Re z > 0``.
        """
        zz = np.asarray(z, dtype=np.complex128)
        if np.any(zz.real <= 0):
            raise KernelError("integral of K**z requires Re(z) > 0")
        a = self.r * zz + 1.0
        side = 1.0 if self.one_sided else 2.0
        out = side * complex_gamma(a) * complex_pow(self.rho * zz, -a)
        return complex(out) if np.ndim(out) == 0 else out

    def l1_norm(self) -> float:
        return float(np.real(self.integral_pow(1.0)))

    def l2_norm_sq(self) -> float:
        return float(np.real(self.integral_pow(2.0)))

    def autoconvolution(self, t):
        """``(K * K)(t) = integral of K(v - t) K(v) dv``, exact.

        For the two-sided kernel the integral splits at ``0`` and ``|t|``;
        the outer pieces are finite sums and the middle piece is a Beta
        integral. The one-sided kernel only has the outer piece.
        """
        t = np.abs(np.asarray(t, dtype=float))
        r = self.r
        m = np.arange(r + 1)
        powers = t[..., None] ** (r - m)
        tail = np.exp(-self.rho * t) * (powers @ self._tail_coef)
        if self.one_sided:
            out = tail
        else:
            mid = np.exp(-self.rho * t) * t ** (2 * r + 1) * self._mid_coef
            out = 2.0 * tail + mid
        return float(out) if out.ndim == 0 else out

    def decay_constants(self, delta: float) -> tuple[float, float, float]:
        """Constants ``(kappa0, kappa1, kappa2)`` of the autocovariance decay bound

        ``(K*K)(delta j) / (K*K)(0) <= kappa0 * j**kappa1 * exp(-kappa2 * j)``
        for integers ``j >= 1`` (two-sided kernel).

        ``kappa0`` sums the normalized coefficients of the two outer pieces
        and the bound on the middle piece, each dominated by ``j**(2r+1)``.
        """
        r, rho = self.r, self.rho
        outer = sum(
            comb(r, m) * factorial(r + m) / factorial(2 * r) * (2 * rho * delta) ** (r - m)
            for m in range(r + 1)
        )
        middle = (rho * delta) ** (2 * r + 1) / factorial(2 * r)
        return outer + middle, float(2 * r + 1), delta * rho

    def truncation_radius(self, level: float) -> float:
        """Largest ``x >= 0`` with ``K(x) > level``."""
        if not level > 0:
            raise KernelError(f"truncation level must be positive, got {level}")
        if level >= self.max_value:
            raise KernelError(
                f"level {level} is not below the kernel maximum {self.max_value}"
            )
        lo = self.r / self.rho
        if self.r == 0:
            return float(-np.log(level) / self.rho)
        # log K is concave, so the root on the decreasing branch is unique
        def f(x):
            return self.r * np.log(x) - self.rho * x - np.log(level)

        hi = max(2 * lo, 1.0)
        while f(hi) > 0:
            hi *= 2
        return float(optimize.brentq(f, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps))


def exponential_kernel(rho: float = 1.0) -> GammaExpKernel:
    """The kernel ``exp(-rho |x|)``."""
    return GammaExpKernel(r=0, rho=rho)


@dataclass(frozen=True)
class NumericalKernel:
    """Quadrature-backed kernel for experimentation with non-closed-form shapes.

    ``func`` must be vectorized, nonnegative, and negligible outside
    ``[lower, upper]``.
    """

    func: Callable[[np.ndarray], np.ndarray]
    lower: float
    upper: float
    one_sided: bool = False

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= self.lower) & (x <= self.upper), self.func(x), 0.0)
        return float(out) if out.ndim == 0 else out

    def _quad_complex(self, f, a, b):
        re = integrate.quad(lambda x: np.real(f(x)), a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
        im = integrate.quad(lambda x: np.imag(f(x)), a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
        return complex(re, im)

    def integral_pow(self, z):
        zz = np.asarray(z, dtype=np.complex128)
        if np.any(zz.real <= 0):
            raise KernelError("integral of K**z requires Re(z) > 0")

        def one(zi):
            def f(x):
                k = float(self.func(np.asarray(x)))
                return 0.0 if k <= 0 else np.exp(zi * np.log(k))

            return self._quad_complex(f, self.lower, self.upper)

        out = np.vectorize(one, otypes=[np.complex128])(zz)
        return complex(out) if out.ndim == 0 else out

    def l1_norm(self) -> float:
        return float(np.real(self.integral_pow(1.0)))

    def l2_norm_sq(self) -> float:
        return float(np.real(self.integral_pow(2.0)))

    def autoconvolution(self, t):
        def one(ti):
            ti = abs(ti)
            a, b = max(self.lower, self.lower + ti), min(self.upper, self.upper + ti)
            if a >= b:
                return 0.0
            return integrate.quad(
                lambda v: float(self.func(np.asarray(v - ti))) * float(self.func(np.asarray(v))),
                a, b, limit=400, epsabs=1e-13,
            )[0]

        out = np.vectorize(one, otypes=[float])(np.asarray(t, dtype=float))
        return float(out) if out.ndim == 0 else out

    @property
    def max_value(self) -> float:
        xs = np.linspace(self.lower, self.upper, 20001)
        i = int(np.argmax(self.func(xs)))
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
        res = optimize.minimize_scalar(
            lambda x: -float(self.func(np.asarray(x))), bounds=(a, b), method="bounded",
            options={"xatol": 1e-12},
        )
        return float(max(-res.fun, self.func(xs[i])))

    def truncation_radius(self, level: float) -> float:
        if level >= self.max_value:
            raise KernelError(f"level {level} is not below the kernel maximum")
        xs = np.linspace(0.0, max(self.upper, -self.lower), 200001)
        above = np.nonzero(self.eval(xs) > level)[0]
        if above.size == 0:
            raise KernelError(f"kernel never exceeds {level} on x >= 0")
        return float(xs[above[-1]])
