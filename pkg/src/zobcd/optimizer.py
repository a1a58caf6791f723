"""ZO-BCD main loop: randomized block selection, sparse gradient steps, traces.

Two variants: "R" (dense Rademacher sample directions) and "RC" (rows of a
random partial circulant). The J=1 configuration recovers the full-gradient
compressed-sensing method the block scheme generalizes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from zobcd.core import ConfigurationError, ConvergenceTrace, NumericalFailure, Oracle, RngStreams
from zobcd.blocks import BlockPartition, random_partition, reshuffle_if_due
from zobcd.estimator import EstimatorConfig, estimate_block_gradient
from zobcd.sampling import PartialCirculantEnsemble, RademacherEnsemble, make_rademacher, required_rows
from zobcd.sparse_recovery import CosampConfig, SparseVector

TERM_BUDGET = "budget_exhausted"
TERM_TARGET = "target_reached"
TERM_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class ZobcdConfig:
    variant: str  # "R" | "RC"
    d: int
    J: int
    s: int
    alpha: float
    delta: float
    budget: int
    seed: int = 0
    b1: float = 2.0
    b3: float = 1.0
    n_cosamp: int = 10
    target: float | None = None
    reshuffle_period: int | None = None
    max_iters: int | None = None
    m_override: int | None = None  # explicit row count, bypassing the b1/b3 formulas
    block_sparsity_factor: float = 1.1

    def __post_init__(self):
        if self.variant not in ("R", "RC"):
            raise ConfigurationError(f"variant must be 'R' or 'RC', got {self.variant!r}")
        if not 1 <= self.J <= self.d:
            raise ConfigurationError(f"need 1 <= J <= d, got J={self.J}, d={self.d}")
        if self.s < 1:
            raise ConfigurationError(f"need s >= 1, got {self.s}")
        if self.alpha <= 0:
            raise ConfigurationError(f"step size must be > 0, got {self.alpha}")
        if self.budget < 1:
            raise ConfigurationError(f"query budget must be >= 1, got {self.budget}")


@dataclass
class RunResult:
    x_final: np.ndarray
    trace: ConvergenceTrace
    termination: str


def step(x_k: np.ndarray, g_hat: SparseVector, alpha: float, p: BlockPartition, j: int) -> np.ndarray:
    """Negative gradient step on block j only: x - alpha * lift(g_hat)."""
    out = x_k.copy()
    if g_hat.nnz:
        out[p.block_indices(j)[g_hat.indices]] -= alpha * g_hat.values
    return out


def theoretical_step_size(L_max: float) -> float:
    if L_max <= 0:
        raise ConfigurationError(f"L_max must be > 0, got {L_max}")
    return 1.0 / L_max


def inexactness_constants(
    rho: float, tau: float, sigma: float, H: float, L_max: float, n: int
) -> tuple[float, float]:
    """Diagnostic constants eta = 2 rho^(2n), theta = 4 tau^2 sigma H / L_max."""
    return 2.0 * rho ** (2 * n), 4.0 * tau**2 * sigma * H / L_max


def admissibility_margin(
    rho: float, tau: float, sigma: float, H: float, L_max: float, n: int, c1: float
) -> float:
    """Left side of the convergence admissibility condition (must be < 1)."""
    return 4.0 * rho ** (4 * n) + 16.0 * tau**2 * sigma * H / (c1 * L_max)


def _make_ensembles(cfg: ZobcdConfig, p: BlockPartition, streams: RngStreams, s_block: int, omega_rng):
    """One measurement operator per distinct block size (equal blocks share one)."""
    dir_rng = streams.substream("directions")
    sizes = sorted(set(int(b) for b in p.block_sizes), reverse=True)
    if cfg.variant == "RC":
        if len(sizes) > 1:
            raise ConfigurationError("ZO-BCD-RC requires d divisible by J (equal blocks)")
        n = sizes[0]
        m = cfg.m_override or required_rows("circulant", s_block, n, b3=cfg.b3)
        z = (dir_rng.integers(0, 2, size=n, dtype=np.int8) * 2 - 1).astype(np.float64)
        omega = omega_rng.choice(n, size=m, replace=False)
        return {n: PartialCirculantEnsemble(z, omega)}
    # Dense Rademacher: draw one master block of directions at the largest
    # block size; smaller blocks use column-truncated views (prefixes of
    # Rademacher rows are Rademacher).
    n_max = sizes[0]
    m_max = cfg.m_override or required_rows("rademacher", s_block, n_max, b1=cfg.b1)
    master = make_rademacher(m_max, n_max, dir_rng)
    out = {n_max: master}
    for n in sizes[1:]:
        m = cfg.m_override or required_rows("rademacher", s_block, n, b1=cfg.b1)
        out[n] = RademacherEnsemble(master.rows[:m, :n])
    return out


def run_zobcd(oracle: Oracle, x0: np.ndarray, cfg: ZobcdConfig, report_f=None) -> RunResult:
    """Run ZO-BCD from x0 until the query budget, the target, or a failure.

    ``report_f``, when given, is a noiseless evaluation channel used only
    for trace reporting and target checks; it is not counted as a query.
    Without it the trace reports each iteration's noisy base query, which
    lags the iterate by one step.
    """
    if x0.shape != (cfg.d,):
        raise ConfigurationError(f"x0 has dim {x0.shape}, config says d={cfg.d}")
    streams = RngStreams(cfg.seed)
    part_rng = streams.substream("partition")
    choice_rng = streams.substream("block_choice")

    p = random_partition(cfg.d, cfg.J, part_rng)
    s_block = max(1, math.ceil(cfg.block_sparsity_factor * cfg.s / cfg.J))
    omega_rng = streams.substream("omega")
    ensembles = _make_ensembles(cfg, p, streams, s_block, omega_rng)
    cosamp_cfg = CosampConfig(s=s_block, n_iters=cfg.n_cosamp)

    x = x0.copy()
    trace = ConvergenceTrace()
    q0 = oracle.query_count
    if report_f is not None:
        trace.append(0, 0, report_f(x), 0)

    termination = TERM_BUDGET
    k = 0
    while oracle.query_count - q0 < cfg.budget:
        if cfg.max_iters is not None and k >= cfg.max_iters:
            break
        k += 1
        t0 = time.perf_counter_ns()
        en0 = oracle.eval_nanos
        j = int(choice_rng.integers(cfg.J))
        idx_size = int(p.block_sizes[j])
        est_cfg = EstimatorConfig(
            delta=cfg.delta, s_block=s_block, cosamp=cosamp_cfg, ensemble=ensembles[idx_size]
        )
        try:
            g_hat, base = estimate_block_gradient(oracle, x, p, j, est_cfg, return_base=True)
        except NumericalFailure:
            termination = TERM_FAILURE
            break
        x = step(x, g_hat, cfg.alpha, p, j)
        new_p = reshuffle_if_due(p, k, cfg.reshuffle_period, part_rng)
        if new_p is not p:
            p = new_p
            if cfg.variant == "RC":
                n = next(iter(ensembles))
                ensembles = {n: ensembles[n].with_new_omega(omega_rng)}
        nanos = (time.perf_counter_ns() - t0) - (oracle.eval_nanos - en0)
        f_rep = report_f(x) if report_f is not None else base
        trace.append(k, oracle.query_count - q0, f_rep, nanos)
        if cfg.target is not None and f_rep <= cfg.target:
            termination = TERM_TARGET
            break

    if len(trace) == 0:
        # no reporting channel and the budget forbade even one iteration
        trace.append(0, max(oracle.query_count - q0, 1), float("nan"), 0)
    return RunResult(x_final=x, trace=trace, termination=termination)
