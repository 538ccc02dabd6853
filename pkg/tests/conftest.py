import numpy as np
import pytest

from mellin_levy.kernels import GammaExpKernel, exponential_kernel
from mellin_levy.levy_models import ExponentialCPP, LevyTriplet


@pytest.fixture
def exp_kernel():
    return exponential_kernel(1.0)


@pytest.fixture
def cpp_model():
    return LevyTriplet(jumps=ExponentialCPP(1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def batch_means_se(x, n_batches=50):
    """Standard error of the mean of a dependent series by non-overlapping batch means."""
    x = np.asarray(x, dtype=float)
    m = x.size // n_batches
    means = x[: m * n_batches].reshape(n_batches, m).mean(axis=1)
    return means.std(ddof=1) / np.sqrt(n_batches)


@pytest.fixture
def gamma_kernel_grid():
    return [GammaExpKernel(r, rho) for r in (0, 1, 2) for rho in (0.5, 1.0, 2.0)]
