"""Shared test data and design builders."""

import numpy as np


# correlation matrix of the four screened gasoline variables (X2, X4, X7, X12)
PHI_1A = np.array(
    [
        [1.000, 0.990, 0.640, 0.824],
        [0.990, 1.000, 0.653, 0.801],
        [0.640, 0.653, 1.000, 0.395],
        [0.824, 0.801, 0.395, 1.000],
    ]
)
PHI_NAMES = ("X2", "X4", "X7", "X12")


def cols(ds, *names):
    """Model column tuple (intercept first) for the given variable names."""
    return tuple(sorted({0} | {ds.column(n) for n in names}))


def random_design(rng, n, k, collinear=0.0):
    """Intercept plus ``k - 1`` shifted normal columns, optionally mixed for collinearity."""
    z = rng.standard_normal((n, k - 1))
    if collinear:
        mix = np.eye(k - 1) + collinear * rng.standard_normal((k - 1, k - 1))
        z = z @ mix
    z = z * rng.uniform(0.5, 3.0, k - 1) + rng.uniform(-2.0, 2.0, k - 1)
    return np.column_stack([np.ones(n), z])
