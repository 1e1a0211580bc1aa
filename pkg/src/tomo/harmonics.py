"""Harmonic expansion of the section function in the direction variable.

For fixed t the map ``xi -> A(xi, t)`` is expanded in real orthonormal
harmonics (Fourier modes on the circle, spherical harmonics on S^2). For
bodies whose section function is polynomial in t near 0 the coefficient
profiles ``p_{k,alpha}(t)`` are polynomials of degree at most ``k + n``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import lpmv

from .bodies import Body, support
from .grids import DirectionGrid, chebyshev_nodes, default_grid
from .polyalg import fit_polynomial
from .reports import DetectionReport, aggregate_verdict
from .sections import DEFAULT_CONFIG, BodySampler, QuadratureConfig

ORTHO_TOL = 1e-10


def harmonic_labels(n: int, L: int) -> list[tuple[int, int]]:
    """``(k, alpha)`` pairs in basis order, ``alpha`` counted from 1."""
    if n == 2:
        return [(0, 1)] + [(k, a) for k in range(1, L + 1) for a in (1, 2)]
    if n == 3:
        return [(k, a) for k in range(L + 1) for a in range(1, 2 * k + 2)]
    raise ValueError(f"harmonics are implemented for n = 2, 3, not {n}")


def circle_basis(points: np.ndarray, L: int) -> np.ndarray:
    """Columns ``1/sqrt(2pi)``, then ``cos(k theta)/sqrt(pi)``, ``sin(k theta)/sqrt(pi)``."""
    theta = np.arctan2(points[:, 1], points[:, 0])
    cols = [np.full(theta.size, 1.0 / math.sqrt(2 * math.pi))]
    for k in range(1, L + 1):
        cols += [np.cos(k * theta) / math.sqrt(math.pi), np.sin(k * theta) / math.sqrt(math.pi)]
    return np.column_stack(cols)


def sphere_basis(points: np.ndarray, L: int) -> np.ndarray:
    """Real orthonormal spherical harmonics, order ``m = -k..k`` within each k.

    ``m < 0`` carries ``sin(|m| phi)``, ``m > 0`` carries ``cos(m phi)``; the
    Condon-Shortley sign included by ``lpmv`` is removed.
    """
    z = np.clip(points[:, 2], -1.0, 1.0)
    phi = np.arctan2(points[:, 1], points[:, 0])
    cols = []
    for k in range(L + 1):
        for m in range(-k, k + 1):
            am = abs(m)
            norm = math.sqrt((2 * k + 1) / (4 * math.pi) * math.factorial(k - am) / math.factorial(k + am))
            P = (-1) ** am * lpmv(am, k, z)
            if m == 0:
                cols.append(norm * P)
            elif m > 0:
                cols.append(math.sqrt(2) * norm * P * np.cos(am * phi))
            else:
                cols.append(math.sqrt(2) * norm * P * np.sin(am * phi))
    return np.column_stack(cols)


def harmonic_basis(grid: DirectionGrid, L: int) -> np.ndarray:
    """Basis sampled on ``grid``; discrete orthonormality is checked here."""
    B = circle_basis(grid.points, L) if grid.dim == 2 else sphere_basis(grid.points, L)
    G = (B * grid.weights[:, None]).T @ B
    dev = float(np.abs(G - np.eye(G.shape[0])).max())
    if dev > ORTHO_TOL:
        raise ValueError(f"direction grid too coarse for degree {L}: orthonormality defect {dev:.2e}")
    return B


@lru_cache(maxsize=8)
def _cached_grid(n: int) -> DirectionGrid:
    return default_grid(n)


def origin_inradius(body: Body, grid: DirectionGrid | None = None) -> float:
    """Distance from the origin to the boundary, ``min_xi h(xi)``, on the grid."""
    grid = grid or _cached_grid(body.dim)
    r = float(np.min(support(body, grid.points)))
    if r <= 0:
        raise ValueError("origin is not interior to the body")
    return r


def harmonic_coefficients(body: Body, t: float, L: int, grid: DirectionGrid | None = None,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Projections ``p_{k,alpha}(t)`` for ``k <= L`` in :func:`harmonic_labels` order."""
    grid = grid or _cached_grid(body.dim)
    if abs(t) >= origin_inradius(body, grid):
        raise ValueError("offset exceeds inradius")
    B = harmonic_basis(grid, L)
    A = BodySampler(body, cfg)(grid.points, np.full(len(grid), float(t)))
    return B.T @ (grid.weights * A)


@dataclass
class HarmonicProfile:
    k: int
    alpha: int
    t: np.ndarray
    values: np.ndarray

    def rows(self):
        for t, v in zip(self.t, self.values):
            yield [self.k, self.alpha, float(t), float(v)]


def harmonic_profiles(body: Body, L: int, t_grid, grid: DirectionGrid | None = None,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[HarmonicProfile]:
    grid = grid or _cached_grid(body.dim)
    t_grid = np.asarray(t_grid, float)
    if np.abs(t_grid).max() >= origin_inradius(body, grid):
        raise ValueError("offset exceeds inradius")
    B = harmonic_basis(grid, L)
    sampler = BodySampler(body, cfg)
    C = np.array([B.T @ (grid.weights * sampler(grid.points, np.full(len(grid), t))) for t in t_grid])
    return [HarmonicProfile(k, a, t_grid, C[:, j]) for j, (k, a) in enumerate(harmonic_labels(body.dim, L))]


def reconstruct(coefficients, points, L: int) -> np.ndarray:
    """Truncated harmonic sum at arbitrary unit directions."""
    P = np.atleast_2d(np.asarray(points, float))
    B = circle_basis(P, L) if P.shape[1] == 2 else sphere_basis(P, L)
    return B @ np.asarray(coefficients, float)


def test_coefficient_polynomiality(body: Body, L: int = 4, window=None, tol: float = 1e-6,
                                   samples: int = 24, grid: DirectionGrid | None = None,
                                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> DetectionReport:
    """Fit each ``p_{k,alpha}`` on a symmetric offset window with degree at most ``k + n``.

    Residuals are relative to ``max |p_{0,1}|`` over the window so that
    coefficients which vanish identically pass rather than fit noise.
    """
    n = body.dim
    if n % 2 == 0:
        warnings.warn("the degree bound is expected only in odd dimension", RuntimeWarning, stacklevel=2)
    grid = grid or _cached_grid(n)
    rho = origin_inradius(body, grid)
    lo, hi = (-rho / 2, rho / 2) if window is None else (float(window[0]), float(window[1]))
    if not -rho < lo < hi < rho:
        raise ValueError("offset exceeds inradius")
    samples = max(samples, L + n + 5)
    ts = chebyshev_nodes(lo, hi, samples)
    profiles = harmonic_profiles(body, L, ts, grid, cfg)
    scale = float(np.abs(profiles[0].values).max())
    items = []
    for prof in profiles:
        bound = prof.k + n
        rep = fit_polynomial(prof.t, prof.values, max_degree=bound, tol=tol, scale=scale)
        if rep.verdict == "polynomial" and rep.best_degree > bound:
            raise AssertionError("fitted degree exceeds the bound")
        items.append({
            "k": prof.k,
            "alpha": prof.alpha,
            "degree": rep.best_degree,
            "bound": bound,
            "relative_residual": rep.relative_residual,
            "verdict": rep.verdict,
        })
    return DetectionReport(
        test="coefficient-polynomiality",
        verdict=aggregate_verdict([it["verdict"] for it in items]),
        residual=max(it["relative_residual"] for it in items),
        items=items,
        params={"L": L, "window": [lo, hi], "tol": tol, "samples": samples},
    )


# keep pytest from collecting it when imported
test_coefficient_polynomiality.__test__ = False
