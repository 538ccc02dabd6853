import numpy as np
import pytest

from mellin_levy.cf_sources import EmpiricalCF, ExactCF
from mellin_levy.ecf import EcfBatch, SmallDenominatorError, denominator_guard, ecf_eval, log_cf_derivatives
from mellin_levy.kernels import GammaExpKernel
from mellin_levy.levy_models import ExponentialCPP, LevyTriplet
from mellin_levy.simulate import simulate_path

# exp(Psi(0.4)) for lam = 1, K = e^{-|x|}; Z ~ Gamma(2, 1)
PHI_04 = 0.62425683709869203329 + 0.59453032104637336504j


def test_at_zero_gives_moments(rng):
    z = rng.gamma(2.0, size=1000)
    phi, d1, d2 = ecf_eval(z, 0.0)
    assert phi == 1.0
    assert d1 == pytest.approx(1j * z.mean())
    assert d2 == pytest.approx(-np.mean(z**2))


def test_single_observation():
    phi, d1, d2 = ecf_eval(np.array([2.0]), np.pi / 4)
    assert phi == pytest.approx(1j)
    assert d1 == pytest.approx(-2.0)
    assert d2 == pytest.approx(-4j)


def test_converges_to_model_cf(cpp_model, exp_kernel):
    n = 20_000
    p = simulate_path(cpp_model, exp_kernel, 1.0, n, alpha=1e-4, seed=21)
    phi, _, _ = ecf_eval(p, 0.4)
    assert abs(phi - PHI_04) < 5 / np.sqrt(n)


def test_invariants(rng):
    z = rng.normal(size=300)
    u = np.linspace(-5, 5, 41)
    b = ecf_eval(z, u)
    assert np.all(np.abs(b.phi) <= 1 + 1e-15)
    np.testing.assert_allclose(ecf_eval(z, -u).phi, np.conj(b.phi), atol=1e-15)
    assert np.all(np.abs(b.d1) <= np.mean(np.abs(z)) + 1e-12)


def test_derivatives_match_finite_differences(rng):
    z = rng.gamma(2.0, size=500)
    u, h = 0.7, 1e-5
    phi_p = ecf_eval(z, u + h)
    phi_m = ecf_eval(z, u - h)
    _, d1, d2 = ecf_eval(z, u)
    assert d1 == pytest.approx((phi_p[0] - phi_m[0]) / (2 * h), abs=1e-8)
    assert d2 == pytest.approx((phi_p[1] - phi_m[1]) / (2 * h), abs=1e-8)


def test_batch_equals_pointwise(rng):
    z = rng.gamma(2.0, size=2000)
    u = np.linspace(-3, 3, 13)
    b = ecf_eval(z, u)
    assert isinstance(b, EcfBatch)
    assert b.n == 2000
    for i, ui in enumerate(u):
        one = ecf_eval(z, ui)
        assert one == (b.phi[i], b.d1[i], b.d2[i])


def test_batch_keeps_shape(rng):
    u = np.zeros((2, 3))
    assert ecf_eval(rng.normal(size=10), u).phi.shape == (2, 3)


def test_empty_sample_rejected():
    with pytest.raises(ValueError):
        ecf_eval(np.array([]), 1.0)


def test_guard():
    assert denominator_guard(1) == 1e-6
    assert denominator_guard(10_000) == pytest.approx(np.log(1e4) / 100)
    with pytest.raises(SmallDenominatorError) as info:
        log_cf_derivatives(np.array([1.0, 0.01]), np.zeros(2), np.zeros(2), guard=0.05, u=np.array([0.0, 3.0]))
    assert info.value.u == 3.0


def test_log_derivative_examples():
    r1, r2 = log_cf_derivatives(1.0, 1j, -1.0)
    assert r1 == 1j
    assert r2 == 0
    # Gaussian-free CF of a point mass at 2: Phi = e^{2iu}
    u = 0.3
    phi = np.exp(2j * u)
    r1, r2 = log_cf_derivatives(phi, 2j * phi, -4 * phi, sigma2_l2=0.5)
    assert r1 == pytest.approx(2j)
    assert r2 == pytest.approx(0.5)


def test_exact_cf_closed_form_matches_quadrature():
    m = LevyTriplet(0.1, 0.2, ExponentialCPP(1.3))
    k = GammaExpKernel(0, 1.5)
    closed = ExactCF(m, k)
    assert closed._closed
    u = np.array([0.2, 1.0, 2.5])
    quad = ExactCF.__new__(ExactCF)
    quad.__init__(m, k)
    quad._closed = False
    for a, b in zip(closed.log_derivatives(u), quad.log_derivatives(u)):
        np.testing.assert_allclose(a, b, rtol=1e-8, atol=1e-10)


def test_exact_cf_value_at_04(cpp_model, exp_kernel):
    phi, _, _ = ExactCF(cpp_model, exp_kernel).values(np.array([0.4]))
    assert phi[0] == pytest.approx(PHI_04, rel=1e-14)


def test_empirical_source(rng):
    z = rng.gamma(2.0, size=100)
    s = EmpiricalCF(z)
    assert s.n == 100
    assert s.mean == pytest.approx(z.mean())
    phi, d1, d2 = s.values([0.5])
    assert phi[0] == ecf_eval(z, np.array([0.5])).phi[0]
