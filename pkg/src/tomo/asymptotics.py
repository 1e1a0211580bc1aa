"""Tangency exponents of section profiles and finite oscillatory expansions.

The oscillatory integral over the boundary,

    I(xi, lam) = ∫_{dK} exp(i lam <x, xi>) <xi, n(x)> dS(x),

equals ``i lam chi_K^(lam xi)`` by the divergence theorem, so it is computed
from the Fourier slice of the section profile. For ellipsoids it can also be
evaluated directly on the boundary, which gives an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import Body, BodyError, Ellipsoid, Polytope, as_direction, support_interval
from .grids import circle_grid, sphere_grid
from .polyalg import DEFAULT_TOL, PLATEAU_FACTOR
from .sections import DEFAULT_CONFIG, QuadratureConfig, fourier_slice, section_values


@dataclass
class ExponentFit:
    alpha: float
    fit_error: float
    s: np.ndarray
    values: np.ndarray


def boundary_exponent(body: Body, xi, window: float = 1e-2, points: int = 40,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> ExponentFit:
    """Slope of ``log A(xi, b+ - s)`` against ``log s`` near the upper tangency."""
    if isinstance(body, Polytope):
        raise BodyError("polytope boundaries have no Morse tangency")
    if not 1e-6 < window < 1:
        raise ValueError("window must lie in (1e-6, 1)")
    xi = as_direction(xi)
    bm, bp = support_interval(body, xi)
    width = bp - bm
    s = np.geomspace(1e-6, window, points) * width
    A, _ = section_values(body, xi, bp - s, cfg, clamp=False)
    if np.any(A <= 0) or not np.all(np.isfinite(A)):
        raise ValueError("shrink window")
    x, y = np.log(s), np.log(A)
    slope, icpt = np.polyfit(x, y, 1)
    res = y - (slope * x + icpt)
    return ExponentFit(float(slope), float(np.sqrt(np.mean(res**2))), s, A)


# ------------------------------------------------------ oscillatory integral


def _surface_ellipsoid(E: Ellipsoid, xi: np.ndarray, lam: float, m: int) -> complex:
    L = E.sqrt_shape
    Linv = E.inverse_shape @ L  # L^{-1} for the symmetric square root
    if E.dim == 2:
        g = circle_grid(2 * m)
    elif E.dim == 3:
        g = sphere_grid(m, 2 * m)
    else:
        raise BodyError("surface quadrature is implemented for n = 2, 3")
    U = g.points
    phase = E.center @ xi + U @ (L @ xi)
    flux = U @ (Linv @ xi)
    return complex(np.linalg.det(L) * np.sum(g.weights * np.exp(1j * lam * phase) * flux))


def surface_integral(E: Ellipsoid, xi, lam: float, rtol: float = 1e-12) -> complex:
    """Direct boundary quadrature of ``I`` for an ellipsoid (nodes doubled until stable)."""
    xi = as_direction(xi)
    R = E.bounding_radius
    m = max(32, int(abs(lam) * R) + 24)
    prev = _surface_ellipsoid(E, xi, lam, m)
    for _ in range(6):
        m *= 2
        cur = _surface_ellipsoid(E, xi, lam, m)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return cur


def oscillatory_integral(body: Body, xi, lam: float, method: str = "slice",
                         cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``I(xi, lam)``, from the Fourier slice or (ellipsoids) the boundary."""
    lam = float(lam)
    if lam == 0.0:
        raise ValueError("lambda must be nonzero")
    if method == "slice":
        return 1j * lam * fourier_slice(body, xi, lam, cfg)
    if method == "surface":
        if not isinstance(body, Ellipsoid):
            raise BodyError("surface path is implemented for ellipsoids only")
        return surface_integral(body, xi, lam)
    raise ValueError(f"unknown method {method!r}")


# ------------------------------------------------------- expansion fits


@dataclass
class ExpansionFitReport:
    b_plus: float
    b_minus: float
    degree: int
    best_degree: int | None
    coefficients_plus: np.ndarray
    coefficients_minus: np.ndarray
    relative_residual: float
    residuals_by_degree: list[float]
    verdict: str
    lambdas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        cplx = lambda c: [[float(z.real), float(z.imag)] for z in c]
        return {
            "b_plus": self.b_plus,
            "b_minus": self.b_minus,
            "degree": self.degree,
            "best_degree": self.best_degree,
            "coefficients_plus": cplx(self.coefficients_plus),
            "coefficients_minus": cplx(self.coefficients_minus),
            "relative_residual": self.relative_residual,
            "residuals_by_degree": list(self.residuals_by_degree),
            "verdict": self.verdict,
        }

    def rows(self):
        for lam, v in zip(self.lambdas, self.values):
            yield [float(lam), float(v.real), float(v.imag)]


def default_lambdas(width: float, count: int = 64) -> np.ndarray:
    return np.geomspace(10.0 / width, 200.0 / width, count)


def _expansion_design(lams: np.ndarray, bp: float, bm: float, d: int) -> np.ndarray:
    inv = lams[:, None] ** -np.arange(d + 1)[None, :]
    return np.hstack([np.exp(1j * lams * bp)[:, None] * inv, np.exp(1j * lams * bm)[:, None] * inv])


def _fit(lams, vals, bp, bm, d, weight):
    V = _expansion_design(lams, bp, bm, d) * weight[:, None]
    y = vals * weight
    norms = np.linalg.norm(V, axis=0)
    c, *_ = np.linalg.lstsq(V / norms, y, rcond=None)
    c = c / norms
    res = float(np.abs(y - V @ c).max() / np.abs(y).max())
    return c, res


def finite_expansion_test(body: Body, xi, lambdas=None, degree: int = 2, tol: float = DEFAULT_TOL,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> ExpansionFitReport:
    """Fit ``I(lam)`` by ``sum_± exp(i lam b±) Q±(1/lam)`` with ``deg Q± <= degree``.

    Samples are weighted by ``lam^((n-1)/2)``, the decay rate of ``I`` at a
    nondegenerate tangency, so every part of the grid counts equally. Degrees
    are tried in increasing order; the first whose relative residual (max
    weighted modulus over max weighted ``|I|``) falls below ``tol`` is
    reported.
    """
    xi = as_direction(xi)
    bm, bp = support_interval(body, xi)
    width = bp - bm
    if width < 1e-9:
        raise ValueError("degenerate width")
    lams = default_lambdas(width) if lambdas is None else np.asarray(lambdas, float)
    if lams.size < 2 * (degree + 1) + 2:
        raise ValueError("lambda grid too small for the requested degree")
    if lams.min() < 5.0 / width:
        raise ValueError("lambda grid must start at 5/width or above")
    vals = np.array([oscillatory_integral(body, xi, lam, cfg=cfg) for lam in lams])
    weight = lams ** (0.5 * (body.dim - 1))
    residuals, best, coef = [], None, None
    for d in range(degree + 1):
        c, r = _fit(lams, vals, bp, bm, d, weight)
        residuals.append(r)
        coef = c
        if r < tol:
            best = d
            break
    dd = len(residuals) - 1
    if best is not None:
        verdict = "finite"
    elif residuals[-1] > PLATEAU_FACTOR * tol:
        verdict = "not-finite"
    else:
        verdict = "inconclusive"
    return ExpansionFitReport(
        b_plus=float(bp), b_minus=float(bm), degree=degree, best_degree=best,
        coefficients_plus=coef[: dd + 1], coefficients_minus=coef[dd + 1:],
        relative_residual=residuals[-1], residuals_by_degree=residuals, verdict=verdict,
        lambdas=lams, values=vals,
    )


def ball_oscillatory_integral(lam) -> np.ndarray:
    """Closed form of ``I`` for the unit ball in R^3 (any direction)."""
    lam = np.asarray(lam, float)
    return 4j * math.pi * (np.sin(lam) - lam * np.cos(lam)) / lam**2
