"""Polynomial algebra in the offset variable.

Polynomiality of a sampled function is decided by least-squares Chebyshev
fits of increasing degree: the best degree is the first whose relative
residual drops below ``tol``; if even ``max_degree`` leaves a residual above
``PLATEAU_FACTOR * tol`` the samples are declared not polynomial.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.integrate import quad

from .bodies import Body, as_direction
from .grids import chebyshev_nodes, gauss_legendre
from .reports import DetectionReport, aggregate_verdict
from .sections import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    SectionProfile,
    section_profile,
)

DEFAULT_TOL = 1e-7
PLATEAU_FACTOR = 10.0
DEFAULT_MARGIN = 1e-3
MAX_CONDITION = 1e12

Poly = Polynomial


class FitError(ValueError):
    pass


class InterpolationWarning(UserWarning):
    pass


def trim_poly(p: Polynomial, rel: float = 1e-12) -> Polynomial:
    """Drop leading coefficients below ``rel`` times the largest one."""
    c = np.asarray(p.coef, dtype=float)
    big = np.abs(c).max() if c.size else 0.0
    if big == 0.0:
        return Polynomial([0.0])
    k = c.size
    while k > 1 and abs(c[k - 1]) <= rel * big:
        k -= 1
    return Polynomial(c[:k])


@dataclass
class PolyFitReport:
    best_degree: int | None
    coefficients: np.ndarray
    rms_residual: float
    max_residual: float
    relative_residual: float
    verdict: str
    residuals_by_degree: list[float] = field(default_factory=list)
    domain: tuple[float, float] = (-1.0, 1.0)

    @property
    def degree(self) -> int | None:
        return self.best_degree

    def poly(self) -> Polynomial:
        return Polynomial(self.coefficients)


def fit_polynomial(t, y, max_degree: int = 20, tol: float = DEFAULT_TOL,
                   scale: float | None = None) -> PolyFitReport:
    """Smallest-degree least-squares polynomial reproducing the samples.

    ``scale`` replaces ``max|y|`` as the denominator of the relative
    residual (useful when a family of samples shares one magnitude).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("t and y must be 1-d arrays of equal length")
    if t.size < max_degree + 5:
        raise FitError(f"need at least max_degree+5 = {max_degree + 5} samples, got {t.size}")
    if np.unique(t).size != t.size:
        raise FitError("sample abscissae must be distinct")
    domain = (float(t.min()), float(t.max()))
    u = (2.0 * t - domain[0] - domain[1]) / (domain[1] - domain[0])
    V = np.polynomial.chebyshev.chebvander(u, max_degree)
    if np.linalg.cond(V) > MAX_CONDITION:
        raise FitError("ill-conditioned fit: increase samples or reduce degree")
    denom = float(np.abs(y).max()) if scale is None else float(scale)
    residuals = []
    best = None
    best_coef = None
    for d in range(max_degree + 1):
        coef, *_ = np.linalg.lstsq(V[:, : d + 1], y, rcond=None)
        r = y - V[:, : d + 1] @ coef
        rel = float(np.abs(r).max() / denom) if denom > 0 else 0.0
        residuals.append(rel)
        if best is None and rel < tol:
            best, best_coef, best_r = d, coef, r
            break
    if best is None:
        best_coef, best_r = coef, r
        verdict = "not-polynomial" if residuals[-1] > PLATEAU_FACTOR * tol else "inconclusive"
    else:
        verdict = "polynomial"
    cheb = Chebyshev(best_coef, domain=list(domain))
    mono = trim_poly(cheb.convert(kind=Polynomial, domain=[-1, 1], window=[-1, 1]))
    if denom == 0.0:
        mono = Polynomial([0.0])
    return PolyFitReport(
        best_degree=best,
        coefficients=np.asarray(mono.coef, dtype=float),
        rms_residual=float(np.sqrt(np.mean(best_r**2))),
        max_residual=float(np.abs(best_r).max()),
        relative_residual=residuals[-1],
        verdict=verdict,
        residuals_by_degree=residuals,
        domain=domain,
    )


def _directions(directions) -> list[np.ndarray]:
    dirs = [as_direction(d) for d in np.atleast_2d(np.asarray(directions, dtype=float))]
    if not dirs:
        raise ValueError("directions must be non-empty")
    return dirs


def _fit_record(xi, rep: PolyFitReport) -> dict:
    return {
        "direction": [float(v) for v in xi],
        "degree": rep.best_degree,
        "relative_residual": rep.relative_residual,
        "verdict": rep.verdict,
    }


def _profile_test(body, directions, transform, max_degree, tol, margin, grid_size, cfg, name):
    items = []
    for xi in _directions(directions):
        prof = section_profile(body, xi, grid_size, cfg, margin=margin)
        rep = fit_polynomial(prof.offsets, transform(prof.values), max_degree, tol)
        items.append(_fit_record(xi, rep))
    verdict = aggregate_verdict([it["verdict"] for it in items])
    return DetectionReport(
        test=name,
        verdict=verdict,
        residual=max(it["relative_residual"] for it in items),
        items=items,
        params={"max_degree": max_degree, "tol": tol, "margin": margin, "grid_size": grid_size},
    )


def test_polynomial_integrability(body: Body, directions, max_degree: int = 20, tol: float = DEFAULT_TOL,
                                  margin: float = DEFAULT_MARGIN, grid_size: int = 64,
                                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> DetectionReport:
    """Fit ``t -> A_K(xi, t)`` per direction on the margin-shrunk support."""
    return _profile_test(body, directions, lambda v: v, max_degree, tol, margin, grid_size, cfg,
                         "polynomial-integrability")


def test_power_polynomiality(body: Body, m: int, directions, max_degree: int = 20, tol: float = DEFAULT_TOL,
                             margin: float = DEFAULT_MARGIN, grid_size: int = 64,
                             cfg: QuadratureConfig = DEFAULT_CONFIG) -> DetectionReport:
    """Fit ``t -> A_K(xi, t)**m`` per direction."""
    if m < 1:
        raise ValueError("power m must be >= 1")
    rep = _profile_test(body, directions, lambda v: v**m, max_degree, tol, margin, grid_size, cfg,
                        "power-polynomiality")
    rep.params["m"] = m
    return rep


# ------------------------------------------------------------- Hilbert


class _ProfileInterpolant:
    """Chebyshev interpolant of ``A / w^(n-1)`` with ``w = sqrt((b+ - s)(s - b-))``.

    Dividing out the tangency factor leaves a smooth function for bodies
    with Morse tangencies, so the interpolant converges spectrally.
    """

    def __init__(self, profile: SectionProfile):
        self.profile = profile
        self.bm, self.bp = profile.b_minus, profile.b_plus
        self.power = profile.xi.size - 1
        s = profile.offsets
        g = profile.values / self.weight(s)
        self.cheb = Chebyshev.fit(s, g, deg=s.size - 1, domain=[self.bm, self.bp])
        c = np.abs(self.cheb.coef)
        self.tail = float(c[-3:].sum()) if c.size > 3 else float(c.sum())

    def weight(self, s):
        w2 = np.clip((self.bp - s) * (s - self.bm), 0.0, None)
        return np.sqrt(w2) ** self.power

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s > self.bm) & (s < self.bp)
        return np.where(inside, self.weight(s) * self.cheb(s), 0.0)


def _regularized_integrals(f: _ProfileInterpolant, ts: np.ndarray, rtol: float, max_nodes: int = 8192):
    """``∫ (f(s) - f(t)) / (t - s) ds`` over the support for every t in ``ts``.

    The substitution ``s = m - r cos(theta)`` removes the square-root
    behaviour at both ends; Gauss-Legendre in theta is doubled until two
    successive estimates agree.
    """
    bm, bp = f.bm, f.bp
    mid, rad = 0.5 * (bm + bp), 0.5 * (bp - bm)
    ft = f(ts)
    scale = float(np.abs(f.profile.values).max()) or 1.0
    prev = None
    n = 64
    while True:
        x, w = gauss_legendre(n)
        theta = 0.5 * np.pi * (x + 1.0)
        s = mid - rad * np.cos(theta)
        jac = rad * np.sin(theta) * 0.5 * np.pi * w
        fs = f(s)
        diff = ts[:, None] - s[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = (fs[None, :] - ft[:, None]) / diff
        integrand[diff == 0.0] = 0.0
        total = integrand @ jac
        if prev is not None and np.all(np.abs(total - prev) <= rtol * np.maximum(np.abs(total), scale)):
            return total, True
        if 2 * n > max_nodes:
            return total, False
        prev = total
        n *= 2


def hilbert_transform_many(profile: SectionProfile, ts, rtol: float = 1e-12) -> np.ndarray:
    """Vectorized :func:`hilbert_transform` for offsets inside the support."""
    f = _ProfileInterpolant(profile)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any((ts <= f.bm) | (ts >= f.bp)):
        raise ValueError("offsets must lie strictly inside the support interval")
    off = profile.offsets
    edge = (ts < off[0]) | (ts > off[-1])
    if edge.any() and f.tail > 1e-6:
        warnings.warn(f"Hilbert transform near the grid edge relies on an extrapolated interpolant "
                      f"(coefficient tail {f.tail:.2e})", InterpolationWarning, stacklevel=2)
    reg, converged = _regularized_integrals(f, ts, rtol)
    if not converged:
        warnings.warn("Hilbert quadrature did not converge; profile is not smooth",
                      InterpolationWarning, stacklevel=2)
    logs = np.log((ts - f.bm) / (f.bp - ts))
    return (reg + f(ts) * logs) / math.pi


def hilbert_transform(profile: SectionProfile, t: float, rtol: float = 1e-12) -> float:
    """``(1/pi) p.v. ∫ f(s) / (t - s) ds`` for the zero-extended profile.

    Singularity subtraction::

        pi H f(t) = ∫ (f(s) - f(t)) / (t - s) ds + f(t) log((t - b-) / (b+ - t))

    ``f`` is the profile's Chebyshev interpolant (see
    :class:`_ProfileInterpolant`). Emits :class:`InterpolationWarning` when
    ``t`` lies beyond the sampled grid and the interpolant's coefficient
    tail exceeds 1e-6. Outside the support the integral is regular and is
    evaluated directly.
    """
    t = float(t)
    if profile.b_minus < t < profile.b_plus:
        return float(hilbert_transform_many(profile, [t], rtol)[0])
    f = _ProfileInterpolant(profile)
    val, _ = quad(lambda s: f(s) / (t - s), f.bm, f.bp, limit=400)
    return val / math.pi


def test_hilbert_polynomiality(body: Body, directions, max_degree: int = 12, tol: float = DEFAULT_TOL,
                               window: float = 0.9, grid_size: int = 96, samples: int = 40,
                               cfg: QuadratureConfig = DEFAULT_CONFIG) -> DetectionReport:
    """Fit ``t -> H A_K(xi, .)(t)`` on the central ``window`` fraction of
    each support interval."""
    n = body.dim
    notes = [] if n % 2 == 0 else ["hypothesis expects even dimension; ran anyway"]
    if notes:
        warnings.warn(notes[0], stacklevel=2)
    items = []
    for xi in _directions(directions):
        prof = section_profile(body, xi, grid_size, cfg)
        mid = 0.5 * (prof.b_minus + prof.b_plus)
        half = 0.5 * window * prof.width
        ts = chebyshev_nodes(mid - half, mid + half, max(samples, max_degree + 5))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", InterpolationWarning)
            hv = hilbert_transform_many(prof, ts)
        rep = fit_polynomial(ts, hv, max_degree, tol)
        items.append(_fit_record(xi, rep))
    return DetectionReport(
        test="hilbert-polynomiality",
        verdict=aggregate_verdict([it["verdict"] for it in items]),
        residual=max(it["relative_residual"] for it in items),
        items=items,
        params={"max_degree": max_degree, "tol": tol, "window": window},
        notes=notes,
    )


# ---------------------------------------------------------- derivatives


MAX_DERIVATIVE_ORDER = 12


def derivative_at_zero(profile: SectionProfile, k: int, max_degree: int = 16) -> float:
    """k-th t-derivative at 0 of a Chebyshev fit to the central half of the profile."""
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    if k > MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order {k} too large for stable differentiation (max 12)")
    bm, bp = profile.b_minus, profile.b_plus
    if not bm < 0.0 < bp:
        raise ValueError("0 must lie strictly inside the support interval")
    mid, quarter = 0.5 * (bm + bp), 0.25 * (bp - bm)
    lo, hi = mid - quarter, mid + quarter
    if not lo < 0.0 < hi:
        lo, hi = min(lo, 0.5 * bm), max(hi, 0.5 * bp)
    sel = (profile.offsets >= lo) & (profile.offsets <= hi)
    s, v = profile.offsets[sel], profile.values[sel]
    if s.size < k + 3:
        raise ValueError(f"profile has only {s.size} samples in the central half; "
                         f"cannot differentiate {k} times")
    fit = Chebyshev.fit(s, v, deg=min(max_degree, s.size - 1), domain=[lo, hi])
    return float(fit.deriv(k)(0.0)) if k else float(fit(0.0))


# --------------------------------------------------------- discriminant


@dataclass(frozen=True, eq=False)
class AlgebraicEquation:
    """``Psi(t, w) = sum_j psi_j(t) w^j`` for one fixed direction."""

    coefficients: tuple

    def __init__(self, coefficients: Sequence):
        polys = tuple(c if isinstance(c, Polynomial) else Polynomial(np.atleast_1d(np.asarray(c, float)))
                      for c in coefficients)
        if len(polys) < 1:
            raise ValueError("an algebraic equation needs at least one coefficient")
        if not np.any(polys[-1].coef):
            raise ValueError("leading coefficient psi_N is the zero polynomial")
        object.__setattr__(self, "coefficients", polys)

    @property
    def N(self) -> int:
        return len(self.coefficients) - 1

    @property
    def t_degree(self) -> int:
        return max(trim_poly(p).degree() for p in self.coefficients)

    def w_coefficients(self, t: float) -> np.ndarray:
        """Coefficients of ``w -> Psi(t, w)``, lowest degree first."""
        return np.array([p(t) for p in self.coefficients])


def sylvester_matrix(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Sylvester matrix of two polynomials given highest-degree-first."""
    m, n = f.size - 1, g.size - 1
    S = np.zeros((m + n, m + n))
    for i in range(n):
        S[i, i:i + m + 1] = f
    for i in range(m):
        S[n + i, i:i + n + 1] = g
    return S


def numeric_discriminant(w_coef: np.ndarray) -> float:
    """``(-1)^{N(N-1)/2} Res(P, P')`` = ``a_N^{2N-1} prod_{i<j} (w_i - w_j)^2``.

    ``w_coef`` is lowest degree first.
    """
    N = w_coef.size - 1
    if N < 1:
        raise ValueError("need degree >= 1 in w")
    f = w_coef[::-1]
    g = (np.arange(N, 0, -1) * f[:-1])
    if N == 1:
        return float(f[0])
    return (-1) ** (N * (N - 1) // 2) * float(np.linalg.det(sylvester_matrix(f, g)))


def discriminant_in_w(eq: AlgebraicEquation, rng_seed: int = 0) -> Polynomial:
    """Discriminant ``D(t)`` of ``w -> Psi(t, w)`` by evaluation-interpolation."""
    N = eq.N
    if N < 1:
        raise ValueError("discriminant needs N >= 1")
    d = eq.t_degree
    M = (2 * N - 1) * d + 1
    nodes = np.cos((2 * np.arange(M) + 1) * np.pi / (2 * M)) if M > 1 else np.array([0.0])
    rng = np.random.default_rng(rng_seed)
    lead = eq.coefficients[-1]
    lead_scale = max(np.abs(lead.coef).max(), 1e-300)
    vals = np.empty(M)
    for i, t in enumerate(nodes):
        for _ in range(8):
            if abs(lead(t)) > 1e-12 * lead_scale:
                break
            t = t + 1e-3 * rng.standard_normal()
        else:
            raise ValueError("degenerate leading coefficient")
        nodes[i] = t
        vals[i] = numeric_discriminant(eq.w_coefficients(t))
    if M == 1:
        return trim_poly(Polynomial([vals[0]]))
    coef = np.polynomial.polynomial.polyfit(nodes, vals, M - 1)
    return trim_poly(Polynomial(coef))


@dataclass
class SingularityVerdict:
    kind: str
    roots: list[float] = field(default_factory=list)
    discriminant: Polynomial | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "roots": [float(r) for r in self.roots],
            "discriminant": [] if self.discriminant is None else [float(c) for c in self.discriminant.coef],
        }


def has_real_singularities(eq: AlgebraicEquation, reference_degree: int | None = None,
                           imag_tol: float = 1e-8) -> SingularityVerdict:
    """Classify ``eq`` as ``free``, ``singular`` (with real roots of D) or
    ``degenerate-at-infinity``.

    A single equation is degenerate at infinity when its discriminant is
    identically zero, or when ``reference_degree`` (the discriminant degree
    of the surrounding family of directions) is given and the coefficient at
    that degree falls below 1e-10 of the largest one.
    """
    D = discriminant_in_w(eq)
    c = np.asarray(D.coef, dtype=float)
    big = np.abs(c).max()
    if big == 0.0:
        return SingularityVerdict("degenerate-at-infinity", [], D)
    if reference_degree is not None:
        lead = c[reference_degree] if reference_degree < c.size else 0.0
        if abs(lead) < 1e-10 * big:
            return SingularityVerdict("degenerate-at-infinity", [], D)
    if D.degree() == 0:
        return SingularityVerdict("free", [], D)
    roots = np.polynomial.polynomial.polyroots(c)
    real = np.sort(roots[np.abs(roots.imag) < imag_tol].real)
    if real.size:
        return SingularityVerdict("singular", [float(r) for r in real], D)
    return SingularityVerdict("free", [], D)


# keep pytest from collecting the public test_* routines when imported
for _fn in (test_polynomial_integrability, test_power_polynomiality, test_hilbert_polynomiality):
    _fn.__test__ = False
