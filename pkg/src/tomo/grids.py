"""Direction grids on the circle and the 2-sphere, plus Gauss rules.

Every grid is antipodally closed: ``grid.antipode[i]`` is the index of
``-grid.points[i]``, so quantities such as ``h(-xi)`` are table lookups.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Unit directions with quadrature weights (summing to the sphere area)."""

    points: np.ndarray
    weights: np.ndarray
    antipode: np.ndarray

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


def circle_grid(m: int = 720, offset: float = 0.0) -> DirectionGrid:
    """Equispaced angles ``offset + 2*pi*i/m``; ``m`` must be even."""
    if m < 2 or m % 2:
        raise ValueError("circle grid needs an even number of angles")
    theta = offset + 2.0 * np.pi * np.arange(m) / m
    pts = np.column_stack([np.cos(theta), np.sin(theta)])
    w = np.full(m, 2.0 * np.pi / m)
    anti = (np.arange(m) + m // 2) % m
    return DirectionGrid(pts, w, anti)


def sphere_grid(n_theta: int = 48, n_phi: int = 96) -> DirectionGrid:
    """Gauss-Legendre in cos(theta) times the trapezoid rule in phi."""
    if n_phi % 2:
        raise ValueError("n_phi must be even for an antipodally closed grid")
    z, wz = gauss_legendre(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    s = np.sqrt(1.0 - zz**2)
    pts = np.stack([s * np.cos(pp), s * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    w = np.outer(wz, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    # Legendre nodes are symmetric: node i pairs with node n_theta-1-i
    it, ip = np.meshgrid(np.arange(n_theta), np.arange(n_phi), indexing="ij")
    anti = ((n_theta - 1 - it) * n_phi + (ip + n_phi // 2) % n_phi).ravel()
    return DirectionGrid(pts, w, anti)


def default_grid(n: int) -> DirectionGrid:
    if n == 2:
        return circle_grid(720)
    if n == 3:
        return sphere_grid(48, 96)
    raise ValueError(f"no default direction grid for dimension {n}")


def chebyshev_nodes(a: float, b: float, m: int) -> np.ndarray:
    """First-kind Chebyshev points on (a, b), increasing, endpoints excluded."""
    k = np.arange(m)
    x = -np.cos((2 * k + 1) * np.pi / (2 * m))
    return 0.5 * (a + b) + 0.5 * (b - a) * x
