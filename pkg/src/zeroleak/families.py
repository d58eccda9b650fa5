"""Seeded random instance generators used by the sweep command and the tests.

Three families cover the three membership branches: deterministic X = f(Y)
(member by construction), common-structure pairs X = (V, N1), Y = (V, N2)
(member by the shared-component condition), and invertible square kernels
(the disclosure polytope collapses to a point, so nothing can be revealed).
"""

from __future__ import annotations

import numpy as np

from . import dist
from .dist import JointDistribution


def _random_simplex(rng: np.random.Generator, n: int, floor: float = 0.02) -> np.ndarray:
    """Full-support probability vector; entries bounded away from zero."""
    v = rng.dirichlet(np.ones(n))
    v = v + floor
    return v / v.sum()


def random_deterministic_pair(
    rng: np.random.Generator, max_x: int = 4, max_y: int = 10
) -> JointDistribution:
    """X = f(Y) with a uniformly random surjective f and full-support P_Y."""
    y_size = int(rng.integers(2, max_y + 1))
    x_size = int(rng.integers(1, min(max_x, y_size) + 1))
    f = np.concatenate([np.arange(x_size), rng.integers(0, x_size, y_size - x_size)])
    rng.shuffle(f)
    p_y = _random_simplex(rng, y_size)
    kernel = np.zeros((x_size, y_size))
    kernel[f, np.arange(y_size)] = 1.0
    return dist.from_conditional(kernel, p_y)


def random_common_info_pair(
    rng: np.random.Generator,
    v_size: int | None = None,
    n1_size: int | None = None,
    n2_size: int | None = None,
) -> JointDistribution:
    """X = (V, N1), Y = (V, N2) with V, N1, N2 independent and full support."""
    nv = v_size or int(rng.integers(2, 4))
    n1 = n1_size or int(rng.integers(1, 4))
    n2 = n2_size or int(rng.integers(1, 4))
    p_v = _random_simplex(rng, nv)
    p_n1 = _random_simplex(rng, n1)
    p_n2 = _random_simplex(rng, n2)
    joint = np.zeros((nv * n1, nv * n2))
    for v in range(nv):
        for a in range(n1):
            for b in range(n2):
                joint[v * n1 + a, v * n2 + b] = p_v[v] * p_n1[a] * p_n2[b]
    return dist.validate_and_normalize(joint)


def random_invertible_pair(rng: np.random.Generator, max_n: int = 4) -> JointDistribution:
    """Square diagonally dominant kernel P(X|Y); membership should fail
    unless the pair degenerates to independence-like corner cases."""
    n = int(rng.integers(2, max_n + 1))
    kernel = 0.6 * np.eye(n) + 0.4 * rng.dirichlet(np.ones(n), size=n).T
    kernel = kernel / kernel.sum(axis=0)[None, :]
    p_y = _random_simplex(rng, n)
    return dist.from_conditional(kernel, p_y)


def random_small_y_pair(
    rng: np.random.Generator, max_y: int = 8, max_x: int = 10
) -> JointDistribution:
    """Arbitrary full-support joint in the |Y| <= |X| regime."""
    y_size = int(rng.integers(2, max_y + 1))
    x_size = int(rng.integers(y_size, max_x + 1))
    joint = rng.dirichlet(np.ones(x_size * y_size)).reshape(x_size, y_size) + 1e-3
    return dist.validate_and_normalize(joint / joint.sum())
