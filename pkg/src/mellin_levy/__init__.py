"""Simulation of Lévy-driven moving-average processes and Mellin-transform
estimation of the driving Lévy density from low-frequency observations."""

from .cf_sources import EmpiricalCF, ExactCF
from .ecf import EcfBatch, SmallDenominatorError, ecf_eval, log_cf_derivatives
from .experiment import RiskReport, StudyConfig, risk_l2, run_study, tune_parameters
from .kernels import GammaExpKernel, KernelError, NumericalKernel, exponential_kernel
from .levy_models import (
    ExponentialCPP,
    LevyTriplet,
    TemperedStable,
    big_psi,
    fourier_nu_bar,
    mellin_nu_bar,
    mellin_x_nu,
    psi,
)
from .mellin import (
    DensityEstimate,
    MellinLine,
    estimate_levy_density,
    estimate_sigma2,
    forward_mellin_first,
    forward_mellin_second,
    inverse_mellin,
    q_factor,
    q_tilde_factor,
)
from .simulate import SamplePath, export_path, load_path, simulate_path
from .special import complex_gamma, complex_pow

__version__ = "0.1.0"
