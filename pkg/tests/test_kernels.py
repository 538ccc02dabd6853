import numpy as np
import pytest
from scipy import integrate

from mellin_levy.kernels import GammaExpKernel, KernelError, NumericalKernel, exponential_kernel

# mpmath root of x e^{-x} = 0.01 on the decreasing branch
RADIUS_R1 = 6.4727751243940046701

KERNELS = [GammaExpKernel(r, rho) for r in (0, 1, 2) for rho in (0.5, 1.0, 2.0)]


def cquad(f, a, b):
    re = integrate.quad(lambda x: np.real(f(x)), a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
    im = integrate.quad(lambda x: np.imag(f(x)), a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
    return complex(re, im)


def test_eval_examples():
    k = exponential_kernel()
    assert k(0.0) == 1.0
    assert k(-1.0) == pytest.approx(np.exp(-1))
    k1 = GammaExpKernel(1, 2.0)
    assert k1(0.0) == 0.0
    assert k1(0.5) == pytest.approx(0.5 * np.exp(-1))
    one = GammaExpKernel(0, 1.0, one_sided=True)
    np.testing.assert_array_equal(one(np.array([-1.0, 0.0])), [0.0, 1.0])


def test_eval_shape_and_symmetry():
    x = np.linspace(-5, 5, 41).reshape(41, 1)
    for k in KERNELS:
        y = k(x)
        assert y.shape == x.shape
        np.testing.assert_array_equal(y, k(-x))


def test_invalid_parameters():
    with pytest.raises(KernelError):
        GammaExpKernel(-1, 1.0)
    with pytest.raises(KernelError):
        GammaExpKernel(1.5, 1.0)
    with pytest.raises(KernelError):
        GammaExpKernel(0, 0.0)


def test_integral_pow_examples():
    k = exponential_kernel()
    assert k.integral_pow(1.0) == pytest.approx(2.0)
    assert k.integral_pow(0.5) == pytest.approx(4.0)
    assert GammaExpKernel(1, 1.0).integral_pow(1.0) == pytest.approx(2.0)
    assert GammaExpKernel(0, 1.0, True).integral_pow(2.0) == pytest.approx(0.5)
    with pytest.raises(KernelError):
        k.integral_pow(0.0)
    with pytest.raises(KernelError):
        k.integral_pow(-0.5 + 1j)


@pytest.mark.parametrize("kernel", [GammaExpKernel(0, 1.0), GammaExpKernel(1, 0.5), GammaExpKernel(2, 2.0)])
def test_integral_pow_matches_quadrature(kernel):
    hi = 80.0 / kernel.rho
    for c in (0.5, 1.0, 1.5, 2.0):
        for y in range(-10, 11, 4):
            z = c + 1j * y

            def f(x):
                kx = kernel(x)
                return np.exp(z * np.log(kx)) if kx > 0 else 0.0

            oracle = 2 * cquad(f, 0, hi)
            got = kernel.integral_pow(z)
            assert abs(got - oracle) <= 1e-6 * max(abs(oracle), 1e-8)


def test_norms():
    k = GammaExpKernel(2, 1.5)
    assert k.l1_norm() == pytest.approx(2 * integrate.quad(k, 0, np.inf)[0], rel=1e-10)
    assert k.l2_norm_sq() == pytest.approx(2 * integrate.quad(lambda x: k(x) ** 2, 0, np.inf)[0], rel=1e-10)


def test_autoconvolution_examples():
    k = exponential_kernel()
    assert k.autoconvolution(0.0) == pytest.approx(1.0)
    assert k.autoconvolution(1.0) == pytest.approx(2 * np.exp(-1))
    assert GammaExpKernel(0, 1.0, True).autoconvolution(1.0) == pytest.approx(0.5 * np.exp(-1))


@pytest.mark.parametrize("kernel", KERNELS + [GammaExpKernel(1, 1.0, True)])
def test_autoconvolution_matches_adaptive_quadrature(kernel):
    for t in (0.0, 0.3, 1.0, 2.7, 6.0):
        hi = 60.0 / kernel.rho + t
        pts = sorted({0.0, t})
        oracle = integrate.quad(lambda v: kernel(v - t) * kernel(v), -hi, hi, points=pts, limit=400,
                                epsabs=1e-14, epsrel=1e-12)[0]
        assert kernel.autoconvolution(t) == pytest.approx(oracle, rel=1e-8, abs=1e-14)
        assert kernel.autoconvolution(-t) == kernel.autoconvolution(t)


def test_autoconvolution_at_zero_is_l2_norm():
    for k in KERNELS:
        assert k.autoconvolution(0.0) == pytest.approx(k.l2_norm_sq(), rel=1e-12)


def test_autoconvolution_trapezoid_cross_check():
    k = GammaExpKernel(1, 1.0)
    v = np.linspace(-40, 40, 400001)
    for t in (0.5, 2.0):
        trap = integrate.trapezoid(k(v - t) * k(v), v)
        assert k.autoconvolution(t) == pytest.approx(trap, rel=1e-6)


@pytest.mark.parametrize("kernel", KERNELS)
@pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
def test_decay_bound_holds(kernel, delta):
    k0, k1, k2 = kernel.decay_constants(delta)
    j = np.arange(1, 51)
    ratio = kernel.autoconvolution(delta * j) / kernel.autoconvolution(0.0)
    bound = k0 * j**k1 * np.exp(-k2 * j)
    assert np.all(ratio <= bound * (1 + 1e-12))


def test_decay_bound_is_tight_for_exponential():
    k = exponential_kernel()
    k0, _, k2 = k.decay_constants(1.0)
    assert k.autoconvolution(1.0) / k.autoconvolution(0.0) == pytest.approx(k0 * np.exp(-k2))


def test_truncation_radius():
    assert exponential_kernel().truncation_radius(0.01) == pytest.approx(np.log(100))
    k = GammaExpKernel(1, 1.0)
    x = k.truncation_radius(0.01)
    assert x == pytest.approx(RADIUS_R1, rel=1e-12)
    assert k(x) == pytest.approx(0.01, rel=1e-12)
    with pytest.raises(KernelError):
        k.truncation_radius(0.5)
    with pytest.raises(KernelError):
        k.truncation_radius(0.0)


def test_numerical_kernel_matches_closed_form():
    ref = GammaExpKernel(1, 1.0)
    nk = NumericalKernel(lambda x: np.abs(x) * np.exp(-np.abs(x)), -60.0, 60.0)
    assert nk.l1_norm() == pytest.approx(ref.l1_norm(), rel=1e-9)
    assert nk.integral_pow(0.5 + 2j) == pytest.approx(ref.integral_pow(0.5 + 2j), rel=1e-7)
    assert nk.autoconvolution(1.5) == pytest.approx(ref.autoconvolution(1.5), rel=1e-8)
    assert nk.max_value == pytest.approx(ref.max_value, rel=1e-6)
    assert nk.truncation_radius(0.01) == pytest.approx(RADIUS_R1, abs=1e-3)
