"""Shared independent oracles for the test suite.

Everything here is intentionally written the dumb way (itertools loops,
dense grids, direct sums) so it shares no code path with the library
implementations it is checking.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from multinorms.spaces import DiscreteSpace, MultiVector


def unit_space(m: int) -> DiscreteSpace:
    return DiscreteSpace(tuple(range(m)), np.ones(m))


def mv(cols, weights=None) -> MultiVector:
    cols = np.asarray(cols, dtype=float)
    m = cols.shape[1]
    w = np.ones(m) if weights is None else np.asarray(weights, dtype=float)
    return MultiVector(DiscreteSpace(tuple(range(m)), w), cols)


def lp(values, p, weights=None):
    values = np.asarray(values, dtype=float)
    if math.isinf(p):
        return float(np.max(np.abs(values)))
    w = np.ones_like(values) if weights is None else np.asarray(weights, dtype=float)
    return float((w * np.abs(values) ** p).sum() ** (1.0 / p))


def sphere_grid(dim: int, density: int) -> np.ndarray:
    """A dense set of directions in R^dim (normalized grid points)."""
    axes = [np.linspace(-1.0, 1.0, density) for _ in range(dim)]
    pts = np.array(list(itertools.product(*axes)))
    pts = pts[np.any(pts != 0, axis=1)]
    return pts


def oracle_mu_grid(x: MultiVector, p: float, r: float, density: int = 21) -> float:
    """Brute-force mu over a dense grid of the dual ball (lower estimate)."""
    w = x.space.weights
    best = 0.0
    for direction in sphere_grid(x.m, density):
        lam = direction.copy()
        # normalize into the dual ball of l^r, i.e. the weighted l^{r'} ball
        if math.isinf(r):
            nrm = (w * np.abs(lam)).sum()
        elif r == 1.0:
            nrm = np.abs(lam).max()
        else:
            rc = r / (r - 1.0)
            nrm = (w * np.abs(lam) ** rc).sum() ** (1.0 / rc)
        if nrm == 0:
            continue
        lam /= nrm
        pairings = x.columns @ (w * lam)
        best = max(best, (np.abs(pairings) ** p).sum() ** (1.0 / p))
    return best


def oracle_mu_signs(x: MultiVector, p: float) -> float:
    """Exact mu on l1 (dual ball = sup ball): enumerate sign vectors."""
    w = x.space.weights
    best = 0.0
    for signs in itertools.product((-1.0, 1.0), repeat=x.m):
        lam = np.asarray(signs)
        pairings = x.columns @ (w * lam)
        best = max(best, (np.abs(pairings) ** p).sum() ** (1.0 / p))
    return best


def oracle_partition_best(x: MultiVector, p: float, q: float):
    """Exhaustive partition supremum by plain iteration."""
    n, m = x.columns.shape
    w = x.space.weights
    best, best_assign = -1.0, None
    for assign in itertools.product(range(n), repeat=m):
        total = 0.0
        for i in range(n):
            mass = sum(w[k] * abs(x.columns[i, k]) ** p
                       for k in range(m) if assign[k] == i)
            total += mass ** (q / p)
        val = total ** (1.0 / q)
        if val > best:
            best, best_assign = val, assign
    return best, best_assign


def oracle_spectral(mat: np.ndarray) -> float:
    """Largest singular value via the eigenvalues of the Gram matrix."""
    gram = mat @ mat.T
    return float(np.sqrt(max(np.linalg.eigvalsh(gram).max(), 0.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
