"""Designs with analytically known index structure.

All generators return an ``n x k`` design whose first column is the all-ones
intercept. Random fixtures draw from a Philox generator keyed by ``seed`` so
the same arguments always give the same matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from eemx.errors import SizeError, UsageError

KINDS = ("helmert", "duplicate_pair", "near_collinear", "identity_corr")


def helmert_columns(n: int) -> np.ndarray:
    """Orthonormal ``n x n`` Helmert basis; column 0 is ``e / sqrt(n)``."""
    h = np.zeros((n, n))
    h[:, 0] = 1.0 / np.sqrt(n)
    for j in range(1, n):
        h[:j, j] = 1.0
        h[j, j] = -float(j)
        h[:, j] /= np.sqrt(j * (j + 1.0))
    return h


def helmert_design(n: int, k: int, scales=None) -> np.ndarray:
    """Intercept plus ``k - 1`` scaled Helmert contrasts.

    ``scales`` has length ``k``; entry 0 is ignored because the intercept
    is always the all-ones column. The non-intercept columns have zero mean
    and are mutually orthogonal, so every I, C and H index equals 1.
    """
    if not 1 <= k <= n:
        raise SizeError(f"need 1 <= k <= n, got n={n}, k={k}")
    scales = np.ones(k) if scales is None else np.asarray(scales, dtype=float)
    if scales.shape != (k,):
        raise SizeError(f"scales must have length {k}")
    if np.any(scales <= 0.0):
        raise UsageError("scales must be positive")
    x = helmert_columns(n)[:, :k] * scales
    x[:, 0] = 1.0
    return x


def identity_corr(n: int, k: int) -> np.ndarray:
    """Design whose non-intercept columns have identity correlation matrix."""
    return helmert_design(n, k)


def near_collinear_design(n: int, base_cols: int, epsilon: float, shift: float = 0.0) -> np.ndarray:
    """Orthogonal base columns plus ``x_1 + epsilon * u`` with ``u`` orthogonal to all of them.

    The last column's CD on the others is ``1 / (1 + epsilon^2)``;
    ``shift`` is added to every non-intercept column to move their means.
    """
    if epsilon <= 0.0:
        raise UsageError("epsilon must be positive")
    if base_cols < 1 or n < base_cols + 3:
        raise SizeError(f"need base_cols >= 1 and n >= base_cols + 3, got n={n}, base_cols={base_cols}")
    h = helmert_columns(n)
    x = np.empty((n, base_cols + 2))
    x[:, 0] = 1.0
    x[:, 1 : base_cols + 1] = h[:, 1 : base_cols + 1]
    x[:, -1] = h[:, 1] + epsilon * h[:, base_cols + 1]
    x[:, 1:] += shift
    return x


def duplicate_pair(n: int, k: int, noise: float = 0.0, seed: int = 0) -> np.ndarray:
    """Random normal design whose last column repeats column 1 (plus optional noise)."""
    if not 3 <= k < n:
        raise SizeError(f"need 3 <= k < n, got n={n}, k={k}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    x = np.empty((n, k))
    x[:, 0] = 1.0
    x[:, 1 : k - 1] = rng.standard_normal((n, k - 2))
    x[:, k - 1] = x[:, 1] + noise * rng.standard_normal(n)
    return x


@dataclass(frozen=True)
class FixtureSpec:
    kind: str
    n: int
    k: int
    parameter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown fixture kind {self.kind!r}; choose from {KINDS}")
        if not self.n > self.k >= 2:
            raise SizeError(f"need n > k >= 2, got n={self.n}, k={self.k}")

    def build(self) -> np.ndarray:
        if self.kind == "helmert":
            return helmert_design(self.n, self.k)
        if self.kind == "identity_corr":
            return identity_corr(self.n, self.k)
        if self.kind == "duplicate_pair":
            return duplicate_pair(self.n, self.k, self.parameter, self.seed)
        eps = self.parameter if self.parameter > 0.0 else 0.1
        return near_collinear_design(self.n, self.k - 2, eps)
