"""Monte Carlo study harness: repeated simulate -> estimate -> L2 risk runs."""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from .kernels import GammaExpKernel
from .levy_models import ExponentialCPP, LevyTriplet
from .mellin import VARIANTS, DensityEstimate, estimate_levy_density
from .simulate import simulate_path

__all__ = [
    "StudyConfig",
    "RiskRow",
    "RiskReport",
    "GridCoverageError",
    "RunFailure",
    "risk_l2",
    "run_study",
    "tune_parameters",
    "emit_table",
    "read_table",
    "emit_plotdata",
    "THREADS_ENV",
]

log = logging.getLogger(__name__)

THREADS_ENV = "MELLIN_LEVY_THREADS"


class GridCoverageError(ValueError):
    """The estimate's x-grid does not cover the risk interval densely enough."""


class RunFailure(RuntimeError):
    """A Monte Carlo run failed under the abort policy."""


@dataclass
class StudyConfig:
    lam: float = 1.0
    sigma2: float = 0.0
    kernel_r: int = 0
    kernel_rho: float = 1.0
    one_sided: bool = False
    delta: float = 1.0
    n_list: list = field(default_factory=lambda: [1000, 5000, 10000, 20000])
    runs: int = 20
    variant: str = "first-stab"
    c: float = 0.5
    u_grid: list = field(default_factory=lambda: [0.3, 0.4, 0.5])
    v_grid: list = field(default_factory=lambda: [1.1, 1.2, 1.3])
    # n -> [U, V]; when present for an n it replaces the tuning grid
    fixed_pairs: dict = field(default_factory=dict)
    alpha: float = 0.01
    base_seed: int = 20240101
    tuning_seed_offset: int = 1_000_000
    paper_faithful: bool = False
    risk_interval: tuple = (1.0, 3.0)
    x_points: int = 256
    k_points: Optional[int] = None
    n_nodes: int = 256
    true_lambda_correction: bool = False
    negative_side_sign: float = 1.0
    failure_policy: str = "abort"
    threads: Optional[int] = None
    # decay rate of the Mellin transform of nu_bar along the line; recorded only
    mellin_decay_gamma: Optional[float] = None

    def __post_init__(self):
        self.n_list = [int(n) for n in self.n_list]
        self.fixed_pairs = {int(k): (float(v[0]), float(v[1])) for k, v in dict(self.fixed_pairs).items()}
        self.risk_interval = tuple(float(a) for a in self.risk_interval)
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not self.n_list:
            raise ValueError("n_list must not be empty")
        if not (self.u_grid and self.v_grid) and not all(n in self.fixed_pairs for n in self.n_list):
            raise ValueError("tuning grids must not be empty")
        a, b = self.risk_interval
        if not a < b:
            raise ValueError(f"risk interval needs a < b, got {self.risk_interval}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.failure_policy not in ("abort", "skip"):
            raise ValueError("failure_policy must be 'abort' or 'skip'")
        if not self.paper_faithful and self.tuning_seed_offset < self.runs:
            raise ValueError("tuning_seed_offset must exceed runs to keep seed blocks disjoint")

    @classmethod
    def from_dict(cls, data: dict) -> "StudyConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "StudyConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fixed_pairs"] = {str(k): list(v) for k, v in self.fixed_pairs.items()}
        d["risk_interval"] = list(self.risk_interval)
        return d

    @property
    def kernel(self) -> GammaExpKernel:
        return GammaExpKernel(self.kernel_r, self.kernel_rho, self.one_sided)

    @property
    def model(self) -> LevyTriplet:
        return LevyTriplet(drift=0.0, sigma2=self.sigma2, jumps=ExponentialCPP(self.lam))

    @property
    def x_grid(self) -> np.ndarray:
        a, b = self.risk_interval
        return np.linspace(a, b, self.x_points)

    def pairs_for(self, n: int) -> list:
        if n in self.fixed_pairs:
            return [self.fixed_pairs[n]]
        return sorted(product((float(u) for u in self.u_grid), (float(v) for v in self.v_grid)))

    def reporting_seeds(self) -> list:
        return [self.base_seed + r for r in range(self.runs)]

    def tuning_seeds(self) -> list:
        if self.paper_faithful:
            return self.reporting_seeds()
        return [self.base_seed + self.tuning_seed_offset + r for r in range(self.runs)]


@dataclass
class RiskRow:
    n: int
    u: float
    v: float
    risks: list
    failures: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def mean(self) -> float:
        return float(np.mean(self.risks)) if self.risks else float("nan")

    @property
    def var(self) -> float:
        if len(self.risks) < 2:
            return 0.0 if self.risks else float("nan")
        return float(np.var(self.risks, ddof=1))

    @property
    def se(self) -> float:
        return float(np.sqrt(self.var / len(self.risks))) if self.risks else float("nan")


@dataclass
class RiskReport:
    rows: list = field(default_factory=list)
    config: Optional[dict] = None

    def row(self, n: int, u: float | None = None, v: float | None = None) -> RiskRow:
        for r in self.rows:
            if r.n == n and (u is None or np.isclose(r.u, u)) and (v is None or np.isclose(r.v, v)):
                return r
        raise KeyError((n, u, v))


def risk_l2(estimate: DensityEstimate, truth, a: float = 1.0, b: float = 3.0, min_points: int = 64) -> float:
    """Simpson approximation of ``int_a^b (estimate - truth)^2 dx`` on the estimate's grid.

    ``truth`` is a callable of x or a jump density object; in the latter
    case ``nu`` or ``nu_bar`` is used according to the estimate's target.
    """
    x = estimate.x
    tol = 1e-9 * max(1.0, abs(b))
    inside = (x >= a - tol) & (x <= b + tol)
    if x[0] > a + tol or x[-1] < b - tol or np.count_nonzero(inside) < min_points:
        raise GridCoverageError(f"x-grid must cover [{a}, {b}] with at least {min_points} points")
    if callable(truth):
        f = truth
    else:
        f = truth.density if estimate.target == "nu" else truth.nu_bar
    xi = x[inside]
    diff = estimate.values[inside] - np.asarray(f(xi), dtype=float)
    return float(simpson(diff * diff, x=xi))


def _thread_count(config: StudyConfig) -> int:
    if config.threads:
        return int(config.threads)
    env = os.environ.get(THREADS_ENV)
    return int(env) if env else 1


def _one_run(config: StudyConfig, n: int, seed: int, pairs: list):
    """Simulate once, then score every (U, V) pair. Returns {pair: risk or exception}."""
    kernel, model = config.kernel, config.model
    path = simulate_path(model, kernel, config.delta, n, config.alpha, seed=seed,
                         negative_side_sign=config.negative_side_sign)
    x = config.x_grid
    a, b = config.risk_interval
    lam = config.lam if config.true_lambda_correction else None
    out = {}
    for u, v in pairs:
        try:
            est = estimate_levy_density(path, kernel, x, config.variant, config.c, u, v,
                                        config.k_points, sigma2=config.sigma2, lam=lam,
                                        n_nodes=config.n_nodes)
            out[(u, v)] = risk_l2(est, model.jumps, a, b)
        except (ArithmeticError, ValueError) as exc:
            out[(u, v)] = exc
    return out


def _evaluate(config: StudyConfig, n: int, seeds: list, pairs: list) -> list:
    t0 = time.perf_counter()
    threads = _thread_count(config)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda s: _one_run(config, n, s, pairs), seeds))
    else:
        results = [_one_run(config, n, s, pairs) for s in seeds]
    elapsed = time.perf_counter() - t0
    rows = []
    for u, v in pairs:
        row = RiskRow(n, u, v, [], [], elapsed / len(pairs))
        for seed, res in zip(seeds, results):
            r = res[(u, v)]
            if isinstance(r, Exception):
                if config.failure_policy == "abort":
                    raise RunFailure(f"n={n} U={u} V={v} seed={seed}: {r}") from r
                log.warning("skipping failed run n=%d U=%g V=%g seed=%d: %s", n, u, v, seed, r)
                row.failures.append(seed)
            else:
                row.risks.append(r)
        rows.append(row)
    return rows


def run_study(config: StudyConfig) -> RiskReport:
    """Risk statistics for every n and every (U, V) pair, on the reporting seeds."""
    report = RiskReport(config=config.to_dict())
    for n in config.n_list:
        rows = _evaluate(config, n, config.reporting_seeds(), config.pairs_for(n))
        for r in rows:
            log.info("n=%d U=%g V=%g mean=%.5g var=%.3g", r.n, r.u, r.v, r.mean, r.var)
        report.rows.extend(rows)
    return report


def _argmin(rows: list) -> RiskRow:
    # rows arrive sorted by (U, V); strict improvement keeps the smaller pair on ties
    best = None
    for r in rows:
        if best is None or r.mean < best.mean:
            best = r
    return best


def tune_parameters(config: StudyConfig) -> dict:
    """Grid-search (U, V) per n on the tuning seeds.

    Returns ``{n: (U, V, rows)}`` where ``rows`` holds the risk statistics of
    every grid point on the tuning seeds.
    """
    pairs = sorted(product((float(u) for u in config.u_grid), (float(v) for v in config.v_grid)))
    if not pairs:
        raise ValueError("tuning grid is empty")
    out = {}
    for n in config.n_list:
        rows = _evaluate(config, n, config.tuning_seeds(), pairs)
        best = _argmin(rows)
        out[n] = (best.u, best.v, rows)
    return out


_TABLE_HEADER = ["n", "U", "V", "mean_risk", "var_risk"]


def emit_table(report: RiskReport, destination) -> None:
    with open(destination, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_TABLE_HEADER)
        for r in report.rows:
            w.writerow([r.n, repr(r.u), repr(r.v), repr(r.mean), repr(r.var)])


def read_table(source) -> list:
    """Rows of a table written by :func:`emit_table` as dicts of numbers."""
    with open(source, newline="") as fh:
        return [
            {"n": int(d["n"]), "U": float(d["U"]), "V": float(d["V"]),
             "mean_risk": float(d["mean_risk"]), "var_risk": float(d["var_risk"])}
            for d in csv.DictReader(fh)
        ]


def emit_plotdata(estimate: DensityEstimate, truth, destination) -> None:
    """Write ``x,nu_hat,nu_true`` for plotting an estimate against the truth."""
    f = truth if callable(truth) else (truth.density if estimate.target == "nu" else truth.nu_bar)
    true_vals = np.asarray(f(estimate.x), dtype=float)
    with open(destination, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "nu_hat", "nu_true"])
        for x, e, t in zip(estimate.x, estimate.values, true_vals):
            w.writerow([repr(float(x)), repr(float(e)), repr(float(t))])
