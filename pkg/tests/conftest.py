"""Shared test helpers: independent oracles and state samplers.

The direct-summation oracle below deliberately mirrors nothing of the
library's vectorized implementation: plain Python loops over math calls,
so criterion values are checked through two unrelated routes.
"""

import math

import numpy as np
import pytest

from curvebody import FullState, regular_gap_deviation


def oracle_criterion_terms(masses, beta, sigma, rho):
    """Direct-summation reference for the criterion quantities."""
    n = len(masses)
    b, c = [], []
    for i in range(n):
        bi = ci = 0.0
        for j in range(n):
            if j == i:
                continue
            d = beta[i] - beta[j]
            omc = 1.0 - math.cos(d)
            den = (2.0 - sigma * rho * rho * omc) ** 1.5
            bi += masses[j] / (math.sqrt(omc) * den)
            ci += masses[j] * math.sin(d) / (omc ** 1.5 * den)
        b.append(bi)
        c.append(ci)
    return b, c


def random_valid_full_state(rng, n=3, k=3, sigma=1):
    """A manifold state with tangent velocities and well-separated bodies.

    Pairs are rejection-sampled to keep every force denominator away from
    zero, so accelerations stay O(10) and identity checks are meaningful
    at tight absolute tolerances.
    """
    while True:
        if sigma == 1:
            raw = rng.normal(size=(n, k))
            positions = raw / np.linalg.norm(raw, axis=1, keepdims=True)
            gram = positions @ positions.T
            off = ~np.eye(n, dtype=bool)
            if np.max(np.abs(gram[off])) > 0.8:
                continue
        else:
            spatial = 0.5 * rng.normal(size=(n, k - 1))
            last = np.sqrt(1.0 + np.sum(spatial**2, axis=1))
            positions = np.column_stack([spatial, last])
            gram = spatial @ spatial.T - np.outer(last, last)
            off = ~np.eye(n, dtype=bool)
            if np.max(gram[off]) > -1.05 or np.min(gram[off]) < -1.8:
                continue
        break
    w = np.ones(k)
    w[-1] = sigma
    velocities = 0.5 * rng.normal(size=(n, k))
    # project onto the tangent space: qdot (.) q = 0
    inner = np.sum(velocities * w * positions, axis=1)
    velocities = velocities - sigma * inner[:, None] * positions
    masses = rng.uniform(0.5, 2.0, n)
    return FullState(
        positions=positions, velocities=velocities, masses=masses, sigma=sigma,
    )


def sample_nonregular_angles(rng, n, min_gap=0.05, min_regular_distance=0.05):
    """Angles pairwise separated by at least ``min_gap`` and at least
    ``min_regular_distance`` away from every regular polygon (measured by
    the largest gap deviation from 2*pi/n)."""
    while True:
        beta = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
        gaps = np.diff(np.concatenate([beta, [beta[0] + 2.0 * np.pi]]))
        if np.min(gaps) < min_gap:
            continue
        if regular_gap_deviation(beta) < min_regular_distance:
            continue
        return beta


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
