"""Block gradient estimation: finite-difference measurements plus sparse recovery.

One call issues exactly m + 1 oracle queries: a base evaluation at x and one
forward difference per sample direction, then recovers the s-sparse block
gradient with CoSaMP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from zobcd.core import ConfigurationError, NumericalFailure, Oracle
from zobcd.blocks import BlockPartition
from zobcd.sparse_recovery import CosampConfig, SparseVector, cosamp


@dataclass(frozen=True)
class EstimatorConfig:
    delta: float
    s_block: int
    cosamp: CosampConfig
    ensemble: object  # SampleEnsemble with n == block size

    def __post_init__(self):
        if self.delta <= 0:
            raise ConfigurationError(f"query radius must be > 0, got {self.delta}")
        if self.s_block > self.ensemble.n:
            raise ConfigurationError(
                f"s_block={self.s_block} exceeds block dimension {self.ensemble.n}"
            )


def estimate_block_gradient(
    oracle: Oracle,
    x: np.ndarray,
    p: BlockPartition,
    j: int,
    cfg: EstimatorConfig,
    return_base: bool = False,
) -> SparseVector | tuple[SparseVector, float]:
    """Estimate the block-j gradient of the oracle's objective at x."""
    idx = p.block_indices(j)
    Z = cfg.ensemble
    if Z.n != idx.size:
        raise ConfigurationError(f"ensemble dimension {Z.n} != block size {idx.size}")
    m = Z.m
    scale = 1.0 / (math.sqrt(m) * cfg.delta)

    base = oracle.eval(x)
    if not math.isfinite(base):
        raise NumericalFailure("oracle returned non-finite base value")

    # Perturb only the block slice of a private copy; restoring from the
    # saved slice keeps the base point bit-exact between queries.
    xw = x.copy()
    save = xw[idx].copy()
    y = np.empty(m)
    for i in range(m):
        xw[idx] = save + cfg.delta * Z.row(i)
        v = oracle.eval(xw)
        if not math.isfinite(v):
            raise NumericalFailure(f"oracle returned non-finite value at direction {i}")
        y[i] = (v - base) * scale
        xw[idx] = save

    g_hat = cosamp(Z, y, cfg.cosamp)
    return (g_hat, base) if return_base else g_hat


def theoretical_radius(sigma: float, H: float | None = None, fallback: float = 1e-2) -> float:
    """Query radius 2*sqrt(sigma/H); falls back when noiseless or H unknown."""
    if sigma < 0:
        raise ConfigurationError(f"noise level must be >= 0, got {sigma}")
    if sigma == 0 or H is None:
        return fallback
    if H <= 0:
        raise ConfigurationError(f"Hessian bound must be > 0, got {H}")
    return 2.0 * math.sqrt(sigma / H)
