"""Measurement operators: dense Rademacher rows and partial circulant ensembles.

Both variants expose the same interface: ``apply`` (forward product with the
1/sqrt(m)-scaled operator), ``adjoint`` (transpose product), ``row`` (an
unscaled +-1 sample direction), and ``columns`` (a scaled column gather used
by the restricted least-squares step of sparse recovery).

The +-1 scaling convention: stored data is exactly +-1; the 1/sqrt(m) factor
is applied lazily at apply/adjoint/columns time.
"""

from __future__ import annotations

import math

import numpy as np

from zobcd.core import ConfigurationError

# Below this length the cyclic correlation is done directly; FFT overhead
# dominates at tiny n.
_FFT_MIN_N = 64


class RademacherEnsemble:
    """m x n matrix of i.i.d. +-1 entries, scaled by 1/sqrt(m) on application."""

    def __init__(self, rows: np.ndarray):
        if rows.ndim != 2:
            raise ConfigurationError("rows must be a 2-D array")
        self.rows = rows
        self.m, self.n = rows.shape
        self._scale = 1.0 / math.sqrt(self.m)

    def apply(self, v: np.ndarray) -> np.ndarray:
        if v.shape != (self.n,):
            raise ValueError(f"expected vector of dim {self.n}, got {v.shape}")
        return (self.rows @ v) * self._scale

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        if y.shape != (self.m,):
            raise ValueError(f"expected vector of dim {self.m}, got {y.shape}")
        return (self.rows.T @ y) * self._scale

    def row(self, i: int) -> np.ndarray:
        return self.rows[i]

    def columns(self, idx: np.ndarray) -> np.ndarray:
        return self.rows[:, idx] * self._scale


class PartialCirculantEnsemble:
    """m rows of the circulant matrix generated by a +-1 vector z.

    Row i (0-based) is ``j -> z[(i + j) mod n]``; the stored row index set
    omega selects which circulant rows participate. Storage is O(n + m):
    the generator, its cached FFT, and omega.
    """

    def __init__(self, z: np.ndarray, omega: np.ndarray):
        z = np.asarray(z, dtype=np.float64)
        omega = np.asarray(omega, dtype=np.intp)
        n = z.shape[0]
        if omega.ndim != 1 or omega.size == 0 or omega.size > n:
            raise ConfigurationError("omega must hold between 1 and n indices")
        if np.unique(omega).size != omega.size or omega.min() < 0 or omega.max() >= n:
            raise ConfigurationError("omega indices must be distinct and in range")
        self.z = z
        self.omega = np.sort(omega)
        self.m = omega.size
        self.n = n
        self._scale = 1.0 / math.sqrt(self.m)
        self._zf = np.fft.rfft(z) if n >= _FFT_MIN_N else None

    def _correlate(self, v: np.ndarray) -> np.ndarray:
        # c[i] = sum_j z[(i + j) mod n] v[j], for all i in [0, n)
        if self._zf is not None:
            return np.fft.irfft(self._zf * np.conj(np.fft.rfft(v)), self.n)
        idx = (np.arange(self.n)[:, None] + np.arange(self.n)[None, :]) % self.n
        return self.z[idx] @ v

    def apply(self, v: np.ndarray) -> np.ndarray:
        if v.shape != (self.n,):
            raise ValueError(f"expected vector of dim {self.n}, got {v.shape}")
        return self._correlate(v)[self.omega] * self._scale

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        if y.shape != (self.m,):
            raise ValueError(f"expected vector of dim {self.m}, got {y.shape}")
        u = np.zeros(self.n)
        u[self.omega] = y
        return self._correlate(u) * self._scale

    def row(self, i: int) -> np.ndarray:
        return np.roll(self.z, -int(self.omega[i]))

    def columns(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.intp)
        return self.z[(self.omega[:, None] + idx[None, :]) % self.n] * self._scale

    def with_new_omega(self, rng: np.random.Generator) -> "PartialCirculantEnsemble":
        """Fresh row subset over the same generator (used on block reshuffles)."""
        omega = rng.choice(self.n, size=self.m, replace=False)
        return PartialCirculantEnsemble(self.z, omega)


SampleEnsemble = RademacherEnsemble | PartialCirculantEnsemble


def make_rademacher(m: int, n: int, rng: np.random.Generator) -> RademacherEnsemble:
    if m <= 0 or n <= 0:
        raise ConfigurationError(f"need m, n >= 1, got m={m}, n={n}")
    rows = (rng.integers(0, 2, size=(m, n), dtype=np.int8) * 2 - 1).astype(np.float64)
    return RademacherEnsemble(rows)


def make_partial_circulant(m: int, n: int, rng: np.random.Generator) -> PartialCirculantEnsemble:
    if m <= 0 or n <= 0:
        raise ConfigurationError(f"need m, n >= 1, got m={m}, n={n}")
    if m > n:
        raise ConfigurationError(f"circulant row count m={m} cannot exceed n={n}")
    z = (rng.integers(0, 2, size=n, dtype=np.int8) * 2 - 1).astype(np.float64)
    omega = rng.choice(n, size=m, replace=False)
    return PartialCirculantEnsemble(z, omega)


def apply(Z: SampleEnsemble, v: np.ndarray) -> np.ndarray:
    return Z.apply(v)


def adjoint(Z: SampleEnsemble, y: np.ndarray) -> np.ndarray:
    return Z.adjoint(y)


def required_rows(variant: str, s: int, n: int, b1: float = 2.0, b3: float = 1.0) -> int:
    """Row count needed for s-sparse recovery, clamped to [s + 1, n].

    Natural log throughout; the constants b1 (dense) and b3 (circulant) are
    user-tunable to compensate for the hidden log base.
    """
    if s < 1 or s > n:
        raise ConfigurationError(f"need 1 <= s <= n, got s={s}, n={n}")
    if b1 <= 0 or b3 <= 0:
        raise ConfigurationError("b1 and b3 must be positive")
    if variant == "rademacher":
        m = math.ceil(b1 * s * math.log(n))
    elif variant == "circulant":
        m = math.ceil(b3 * s * math.log(max(s, 2)) ** 2 * math.log(n) ** 2)
    else:
        raise ConfigurationError(f"unknown ensemble variant: {variant!r}")
    return min(max(m, s + 1), n)
