"""Complex Gamma function and principal-branch complex powers.

Both functions accept Python scalars or numpy arrays. Scalars come back as
``complex``; arrays come back as ``complex128`` arrays of the same shape.
"""

from __future__ import annotations

import numpy as np

__all__ = ["PoleError", "ZeroBaseError", "complex_gamma", "log_gamma", "complex_pow"]

# Lanczos approximation, g = 7, nine terms.
_G = 7.0
_COEF = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)
_POLE_TOL = 1e-12


class PoleError(ValueError):
    """Gamma evaluated at (or within 1e-12 of) a non-positive integer."""


class ZeroBaseError(ValueError):
    """Complex power with zero base and non-positive real exponent."""


def _as_complex(z):
    scalar = np.ndim(z) == 0
    return np.atleast_1d(np.asarray(z, dtype=np.complex128)), scalar


def _check_poles(z):
    near = np.round(z.real)
    bad = (near <= 0) & (np.abs(z - near) < _POLE_TOL)
    if np.any(bad):
        raise PoleError(f"Gamma has a pole at z = {z[bad][0]}")


def _lanczos_log(z):
    # log Gamma(z) for Re z >= 0.5
    zm = z - 1.0
    x = np.full_like(zm, _COEF[0])
    for i in range(1, len(_COEF)):
        x = x + _COEF[i] / (zm + i)
    t = zm + _G + 0.5
    return _LOG_SQRT_2PI + (zm + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z):
    # log sin(pi z) for Im z >= 0, without overflow for large Im z
    e = np.exp(2j * np.pi * z)
    return -1j * np.pi * z + np.log((e - 1.0) / 2j)


def _log_gamma_upper(z):
    # Im z >= 0 assumed
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos_log(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        out[left] = _LOG_PI - _log_sin_pi(zl) - _lanczos_log(1.0 - zl)
    return out


def log_gamma(z):
    """A logarithm of Gamma(z) (not necessarily the principal branch of log Gamma).

    Only ``exp(log_gamma(z))`` is meaningful; the imaginary part may differ
    from the principal value by a multiple of 2*pi.
    """
    zz, scalar = _as_complex(z)
    _check_poles(zz)
    lower = zz.imag < 0
    work = np.where(lower, np.conj(zz), zz)
    out = _log_gamma_upper(work)
    out = np.where(lower, np.conj(out), out)
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


def complex_gamma(z):
    """Gamma function for complex arguments.

    Lanczos approximation for Re z >= 0.5 and the reflection formula
    otherwise, both evaluated in log space so that |Im z| in the hundreds
    neither overflows nor underflows prematurely. The lower half-plane is
    obtained by conjugation, hence ``complex_gamma(conj(z)) ==
    conj(complex_gamma(z))`` holds exactly.

    Raises
    ------
    PoleError
        If ``z`` is within 1e-12 of a non-positive integer.
    """
    zz, scalar = _as_complex(z)
    _check_poles(zz)
    lower = zz.imag < 0
    work = np.where(lower, np.conj(zz), zz)
    g = np.exp(_log_gamma_upper(work))
    # real axis: drop the rounding residue in the imaginary part
    g = np.where(work.imag == 0.0, g.real + 0j, g)
    g = np.where(lower, np.conj(g), g)
    return complex(g[0]) if scalar else g.reshape(np.shape(z))


def complex_pow(base, exponent):
    """Principal-branch power ``exp(exponent * Log(base))``, Im Log in (-pi, pi]."""
    b = np.asarray(base, dtype=np.complex128)
    e = np.asarray(exponent, dtype=np.complex128)
    b, e = np.broadcast_arrays(b + 0.0, e)  # +0.0 folds a signed-zero imaginary part
    zero = b == 0
    if np.any(zero & (e.real <= 0)):
        raise ZeroBaseError("zero base with non-positive real exponent")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(e * np.log(np.where(zero, 1.0, b)))
    out = np.where(zero, 0.0, out)
    # exact for the unit exponent
    out = np.where(e == 1.0, b, out)
    if out.ndim == 0:
        return complex(out)
    return out
