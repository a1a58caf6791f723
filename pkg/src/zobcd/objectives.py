"""Synthetic benchmark objectives with analytic (sub)gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from zobcd.core import ConfigurationError
from zobcd.blocks import BlockPartition
from zobcd.sparse_recovery import SparseVector, top_k_magnitude


@dataclass(frozen=True)
class SparseQuadric:
    """f(x) = 1/2 sum_{i in support} a_i x_i^2, with fixed s-sparse gradient."""

    d: int
    support: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        support = np.sort(np.asarray(self.support, dtype=np.intp))
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if support.size != coeffs.size:
            raise ConfigurationError("support and coeffs must have equal length")
        if support.size and (np.unique(support).size != support.size or support[-1] >= self.d):
            raise ConfigurationError("support indices must be distinct and within [0, d)")
        if np.any(coeffs <= 0):
            raise ConfigurationError("quadric coefficients must be positive")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def random(cls, d: int, s: int, rng: np.random.Generator, coeff: float = 1.0) -> "SparseQuadric":
        support = rng.choice(d, size=s, replace=False)
        return cls(d, support, np.full(s, coeff))

    @property
    def s(self) -> int:
        return self.support.size

    @property
    def l_max(self) -> float:
        return float(self.coeffs.max())

    def hessian_l1_bound(self, p: BlockPartition | None = None) -> float:
        """Max over blocks of the elementwise l1 norm of the block Hessian.

        The Hessian is diagonal, so per block this is the sum of the a_i
        whose support coordinate falls in that block.
        """
        if p is None:
            return float(self.coeffs.sum())
        block_of = p.block_of()[self.support]
        return float(np.bincount(block_of, weights=self.coeffs, minlength=p.J).max())

    def eval(self, x: np.ndarray) -> float:
        return 0.5 * float(self.coeffs @ x[self.support] ** 2)

    def grad(self, x: np.ndarray) -> SparseVector:
        return SparseVector(self.support, self.coeffs * x[self.support], self.d)

    def __call__(self, x: np.ndarray) -> float:
        return self.eval(x)


@dataclass(frozen=True)
class MaxSSumSquared:
    """f(x) = 1/2 * (sum of squares of the s largest-in-magnitude entries).

    The gradient support moves with x; ties go to the lowest index.
    """

    d: int
    s: int

    def __post_init__(self):
        if not 1 <= self.s <= self.d:
            raise ConfigurationError(f"need 1 <= s <= d, got s={self.s}, d={self.d}")

    def eval(self, x: np.ndarray) -> float:
        if self.s == self.d:
            return 0.5 * float(x @ x)
        a = np.abs(x)
        top = np.partition(a, self.d - self.s)[self.d - self.s :]
        return 0.5 * float(top @ top)

    def grad(self, x: np.ndarray) -> SparseVector:
        sel = top_k_magnitude(x, self.s)
        return SparseVector(sel, x[sel], self.d)

    def __call__(self, x: np.ndarray) -> float:
        return self.eval(x)


OBJECTIVES = ("sparse-quadric", "max-s-sum-squared")


def make_objective(name: str, d: int, s: int, rng: np.random.Generator, coeff: float = 1.0):
    """Objective factory for CLI selection; support drawn from rng."""
    if name == "sparse-quadric":
        return SparseQuadric.random(d, s, rng, coeff)
    if name == "max-s-sum-squared":
        return MaxSSumSquared(d, s)
    raise ConfigurationError(f"unknown objective: {name!r} (choose from {OBJECTIVES})")
