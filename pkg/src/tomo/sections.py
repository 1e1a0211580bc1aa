"""Section function A_K(xi, t), cutoff volumes, Fourier slices and
odd-dimensional back-projection.

``A_K(xi, t)`` is the (n-1)-volume of ``K ∩ {<x, xi> = t}``, i.e. the Radon
transform of the indicator of ``K``. Evaluation paths:

* ellipsoids: affine image of the unit-ball formula (exact);
* polytopes: interval clipping (n=2) or polygon clipping (n=3) (exact);
* Lp-balls: radial bisection from an interior point of the slice, then
  ``(1/2) ∮ rho^2`` by the periodic trapezoid rule (n=3) or the sum of two
  radii (n=2);
* anything with a membership predicate: tensor Gauss-Legendre or seeded
  Monte-Carlo integration over the slicing plane.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .bodies import (
    Body,
    BodyError,
    Ellipsoid,
    LpBall,
    OracleBody,
    Polytope,
    as_direction,
    minkowski_functional,
    outward_normal,
    support,
    support_interval,
    support_point,
    translate,
)
from .grids import DirectionGrid, chebyshev_nodes, gauss_legendre, sphere_grid

METHODS = ("auto", "exact", "clipping", "tensor-gauss", "monte-carlo")
TANGENCY_CLAMP = 1e-6
INVERSION_CONSTANT_3D = -1.0 / (8.0 * math.pi**2)


class QuadratureError(RuntimeError):
    """Offset quadrature did not converge; ``estimate`` holds the last value."""

    def __init__(self, message: str, estimate):
        super().__init__(f"{message} (achieved estimate {estimate!r})")
        self.estimate = estimate


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "auto"
    points: int = 64
    samples: int = 200_000
    seed: int = 0
    angles: int = 256
    rtol: float = 1e-11
    max_nodes: int = 4096

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.points <= 0 or self.samples <= 0 or self.angles <= 0:
            raise ValueError("sample counts must be positive")


DEFAULT_CONFIG = QuadratureConfig()


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def ball_section(n: int, t, radius: float = 1.0):
    """Closed form ``kappa_{n-1} (r^2 - t^2)^{(n-1)/2}`` for the centered ball."""
    t = np.asarray(t, dtype=float)
    s = np.clip(radius**2 - t**2, 0.0, None)
    return unit_ball_volume(n - 1) * s ** ((n - 1) / 2)


@dataclass(frozen=True, eq=False)
class SectionProfile:
    xi: np.ndarray
    offsets: np.ndarray
    values: np.ndarray
    err: np.ndarray
    b_minus: float
    b_plus: float

    @property
    def width(self) -> float:
        return self.b_plus - self.b_minus

    def rows(self):
        for t, a, e in zip(self.offsets, self.values, self.err):
            yield [*self.xi.tolist(), float(t), float(a), float(e)]

    def header(self) -> list[str]:
        return [f"xi_{i + 1}" for i in range(self.xi.size)] + ["t", "A", "err"]


# ------------------------------------------------------------ evaluation


def _plane_basis(xi: np.ndarray) -> np.ndarray:
    """Orthonormal basis of xi-perp as rows, shape (n-1, n)."""
    n = xi.size
    if n == 2:
        return np.array([[-xi[1], xi[0]]])
    q, _ = np.linalg.qr(np.column_stack([xi, np.eye(n)]))
    return q[:, 1:n].T * np.sign(q[:, 0] @ xi)


def _ellipsoid_values(E: Ellipsoid, X: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Vectorized over rows of X (m, n) and offsets T (m,)."""
    n = E.dim
    h0 = np.sqrt(np.einsum("ij,jk,ik->i", X, E.shape, X))
    s = (T - X @ E.center) / h0
    base = np.clip(1.0 - s**2, 0.0, None)
    scale = unit_ball_volume(n - 1) * math.sqrt(np.linalg.det(E.shape)) / h0
    return scale * base ** ((n - 1) / 2)


def _polytope_values_2d(P: Polytope, xi: np.ndarray, T: np.ndarray) -> np.ndarray:
    d = np.array([-xi[1], xi[0]])
    ad = P.normals @ d
    rhs = P.offsets[None, :] - np.outer(T, P.normals @ xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = rhs / ad
    upper = np.where(ad > 0, bound, np.inf)
    lower = np.where(ad < 0, bound, -np.inf)
    blocked = (ad == 0) & (rhs < 0)
    length = upper.min(axis=1) - lower.max(axis=1)
    length[blocked.any(axis=1)] = 0.0
    return np.clip(length, 0.0, None)


def _clip_polygon(poly: np.ndarray, a: np.ndarray, c: float) -> np.ndarray:
    """Clip a convex polygon (k, 2) to ``a . p <= c`` (Sutherland-Hodgman)."""
    if poly.shape[0] == 0:
        return poly
    s = poly @ a - c
    inside = s <= 0
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    out = []
    k = poly.shape[0]
    for i in range(k):
        j = (i + 1) % k
        if inside[i]:
            out.append(poly[i])
        if inside[i] != inside[j]:
            lam = s[i] / (s[i] - s[j])
            out.append(poly[i] + lam * (poly[j] - poly[i]))
    return np.array(out) if out else poly[:0]


def _shoelace(poly: np.ndarray) -> float:
    if poly.shape[0] < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def section_polygon(P: Polytope, xi: np.ndarray, t: float) -> np.ndarray:
    """Vertices of the slice of a 3-polytope, in plane coordinates."""
    basis = _plane_basis(xi)
    a2 = P.normals @ basis.T
    rhs = P.offsets - t * (P.normals @ xi)
    ref = basis @ P.reference_point
    R = 1.5 * P.bounding_radius
    poly = ref + R * np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    for a, c in zip(a2, rhs):
        if not np.any(a):
            if c < 0:
                return poly[:0]
            continue
        poly = _clip_polygon(poly, a, c)
        if poly.shape[0] == 0:
            break
    return poly


def _polytope_values_3d(P: Polytope, xi: np.ndarray, T: np.ndarray) -> np.ndarray:
    return np.array([_shoelace(section_polygon(P, xi, t)) for t in T])


def _lpball_values(B: LpBall, xi: np.ndarray, T: np.ndarray, angles: int) -> np.ndarray:
    n = B.dim
    if n not in (2, 3):
        raise BodyError("Lp-ball sections are supported for n = 2, 3 only")
    bm, bp = support_interval(B, xi)
    xp = support_point(B, xi)
    xm = support_point(B, -xi)
    lam = np.clip((T - bm) / (bp - bm), 0.0, 1.0)
    # the segment between opposite support points crosses every slice inside K
    p0 = xm[None, :] + lam[:, None] * (xp - xm)[None, :]
    basis = _plane_basis(xi)
    if n == 2:
        dirs = np.vstack([basis[0], -basis[0]])
    else:
        th = 2.0 * np.pi * np.arange(angles) / angles
        dirs = np.cos(th)[:, None] * basis[0] + np.sin(th)[:, None] * basis[1]
    lo = np.zeros((T.size, dirs.shape[0]))
    hi = np.full_like(lo, 2.0 * B.bounding_radius)
    for _ in range(62):
        mid = 0.5 * (lo + hi)
        inside = B.gauge(p0[:, None, :] + mid[..., None] * dirs[None, :, :]) <= 1.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    rho = 0.5 * (lo + hi)
    inside_band = (T > bm) & (T < bp)
    if n == 2:
        out = rho.sum(axis=1)
    else:
        out = 0.5 * (2.0 * np.pi / angles) * np.sum(rho**2, axis=1)
    return np.where(inside_band, out, 0.0)


def _plane_frame(body: Body, xi: np.ndarray, t: float):
    basis = _plane_basis(xi)
    ref = body.reference_point
    origin = ref - (ref @ xi - t) * xi
    return origin, basis, 1.02 * body.bounding_radius


def _membership_of(body: Body):
    from .bodies import membership

    return lambda pts: membership(body, pts)


def _tensor_gauss_values(body: Body, xi: np.ndarray, T: np.ndarray, points: int):
    inside = _membership_of(body)
    vals, errs = [], []
    for t in T:
        origin, basis, R = _plane_frame(body, xi, t)
        est = []
        for m in (points, max(points // 2, 1)):
            x, w = gauss_legendre(m)
            axes = [R * x] * basis.shape[0]
            mesh = np.meshgrid(*axes, indexing="ij")
            coords = np.stack([g.ravel() for g in mesh], axis=1)
            wts = np.prod(np.meshgrid(*([R * w] * basis.shape[0]), indexing="ij"), axis=0).ravel()
            pts = origin + coords @ basis
            est.append(float(np.sum(wts * inside(pts))))
        vals.append(est[0])
        errs.append(abs(est[0] - est[1]))
    return np.array(vals), np.array(errs)


def _point_rng(seed: int, xi: np.ndarray, t: float) -> np.random.Generator:
    digest = hashlib.blake2b(np.r_[xi, t].astype("<f8").tobytes(), digest_size=16).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *words])))


def _monte_carlo_values(body: Body, xi: np.ndarray, T: np.ndarray, samples: int, seed: int):
    inside = _membership_of(body)
    vals, errs = [], []
    for t in T:
        origin, basis, R = _plane_frame(body, xi, t)
        rng = _point_rng(seed, xi, float(t))
        coords = rng.uniform(-R, R, size=(samples, basis.shape[0]))
        frac = float(np.mean(inside(origin + coords @ basis)))
        area = (2.0 * R) ** basis.shape[0]
        vals.append(area * frac)
        errs.append(area * math.sqrt(max(frac * (1.0 - frac), 0.0) / samples))
    return np.array(vals), np.array(errs)


def _raw_values(body: Body, xi: np.ndarray, T: np.ndarray, cfg: QuadratureConfig):
    method = cfg.method
    if method == "auto":
        method = "tensor-gauss" if isinstance(body, OracleBody) else "exact"
    if method == "monte-carlo":
        return _monte_carlo_values(body, xi, T, cfg.samples, cfg.seed)
    if method == "tensor-gauss":
        return _tensor_gauss_values(body, xi, T, cfg.points)
    eps = np.finfo(float).eps
    if isinstance(body, Ellipsoid) and method == "exact":
        v = _ellipsoid_values(body, np.broadcast_to(xi, (T.size, xi.size)), T)
        return v, 8 * eps * v
    if isinstance(body, Polytope) and method in ("exact", "clipping"):
        if body.dim == 2:
            v = _polytope_values_2d(body, xi, T)
        elif body.dim == 3:
            v = _polytope_values_3d(body, xi, T)
        else:
            raise BodyError("polytope clipping is supported for n = 2, 3 only")
        return v, 64 * eps * np.maximum(v, 0.0)
    if isinstance(body, LpBall) and method == "exact":
        v = _lpball_values(body, xi, T, cfg.angles)
        return v, 1e-13 * v
    raise ValueError(f"method {cfg.method!r} is not available for {type(body).__name__}")


def section_values(body: Body, xi, t, cfg: QuadratureConfig = DEFAULT_CONFIG, clamp: bool = True):
    """Vectorized ``A_K(xi, t)`` over an array of offsets; returns (values, err)."""
    xi = as_direction(xi)
    if xi.size != body.dim:
        raise ValueError("direction dimension does not match body")
    T = np.atleast_1d(np.asarray(t, dtype=float))
    bm, bp = support_interval(body, xi)
    vals = np.zeros(T.size)
    errs = np.zeros(T.size)
    band = TANGENCY_CLAMP * (bp - bm) if clamp else 0.0
    live = (T > bm + band) & (T < bp - band)
    if live.any():
        v, e = _raw_values(body, xi, T[live], cfg)
        vals[live] = np.clip(v, 0.0, None)
        errs[live] = e
    return vals, errs


def section_function(body: Body, xi, t: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """``(A_K(xi, t), error estimate)``; exactly ``(0, 0)`` off the body."""
    v, e = section_values(body, xi, [t], cfg)
    return float(v[0]), float(e[0])


def section_profile(body: Body, xi, grid_size: int = 64, cfg: QuadratureConfig = DEFAULT_CONFIG,
                    margin: float = 0.0) -> SectionProfile:
    """Profile on first-kind Chebyshev offsets over the support interval,
    optionally shrunk by ``margin`` times the width at each end."""
    if grid_size < 8:
        raise ValueError("grid-size must be at least 8")
    xi = as_direction(xi)
    bm, bp = support_interval(body, xi)
    w = bp - bm
    offsets = chebyshev_nodes(bm + margin * w, bp - margin * w, grid_size)
    vals, errs = section_values(body, xi, offsets, cfg)
    return SectionProfile(xi, offsets, vals, errs, bm, bp)


# ------------------------------------------------------------ integrals


def _breakpoints(body: Body, xi: np.ndarray, a: float, b: float) -> np.ndarray:
    pts = [a, b]
    if isinstance(body, Polytope) and body.vertices is not None:
        off = body.vertices @ xi
        tol = 1e-12 * (b - a)
        pts.extend(o for o in off if a + tol < o < b - tol)
    return np.unique(np.array(pts))


def integrate_offsets(body: Body, xi, integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
                      a: float | None = None, b: float | None = None,
                      cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Integrate ``integrand(t, A(xi, t))`` over ``[a, b]`` (default: support).

    Each panel between breakpoints is mapped by ``t = m - r cos(theta)``,
    which absorbs the algebraic vanishing of A at tangency, and integrated by
    Gauss-Legendre in theta with node doubling until successive estimates
    agree. ``integrand`` may return shape (T,) or (T, k), real or complex.
    """
    xi = as_direction(xi)
    bm, bp = support_interval(body, xi)
    lo = bm if a is None else max(a, bm)
    hi = bp if b is None else min(b, bp)
    if hi <= lo:
        return 0.0 * np.asarray(integrand(np.array([bm]), np.zeros(1)))[0]
    edges = _breakpoints(body, xi, lo, hi)
    mids = 0.5 * (edges[1:] + edges[:-1])
    rads = 0.5 * (edges[1:] - edges[:-1])
    prev = None
    n = 16
    while True:
        x, w = gauss_legendre(n)
        theta = 0.5 * np.pi * (x + 1.0)
        tt = (mids[:, None] - rads[:, None] * np.cos(theta)[None, :]).ravel()
        jac = (rads[:, None] * np.sin(theta)[None, :] * (0.5 * np.pi * w)[None, :]).ravel()
        A, errA = section_values(body, xi, tt, cfg, clamp=False)
        f = np.asarray(integrand(tt, A))
        jj = jac.reshape((-1,) + (1,) * (f.ndim - 1))
        total = np.sum(f * jj, axis=0)
        noise = float(np.sum(jac * errA)) * float(np.max(np.abs(integrand(tt, np.ones_like(A)))))
        # tolerance relative to the L1 mass so oscillatory cancellation does not stall it
        mass = max(float(np.max(np.sum(np.abs(f) * jj, axis=0))), 1e-300)
        if prev is not None:
            diff = np.max(np.abs(total - prev))
            if diff <= cfg.rtol * mass + 2.0 * noise:
                return total
        if 2 * n > cfg.max_nodes:
            raise QuadratureError("offset quadrature did not converge", total)
        prev = total
        n *= 2


def cutoff_volume(body: Body, xi, t: float, sign: Literal["+", "-"] = "-",
                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``V-(xi, t) = ∫_{b-}^{t} A``; ``V+ = Vol(K) - V-``."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    xi = as_direction(xi)
    bm, bp = support_interval(body, xi)
    tc = min(max(float(t), bm), bp)
    vminus = float(integrate_offsets(body, xi, lambda s, A: A, bm, tc, cfg)) if tc > bm else 0.0
    if sign == "-":
        return vminus
    vol = float(integrate_offsets(body, xi, lambda s, A: A, bm, bp, cfg))
    return vol - vminus


def volume(body: Body, xi=None, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    if xi is None:
        xi = np.eye(body.dim)[0]
    return cutoff_volume(body, xi, support(body, xi), "-", cfg)


def fourier_slice(body: Body, xi, lam: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``chi_K^(lam xi) = ∫ e^{i lam t} A_K(xi, t) dt``."""
    lam = float(lam)
    val = integrate_offsets(body, xi, lambda s, A: np.exp(1j * lam * s) * A, cfg=cfg)
    return complex(val)


# ------------------------------------------------------------ inversion


class BodySampler:
    """Callable ``(X, T) -> A`` over rows of directions, with support intervals."""

    def __init__(self, body: Body, cfg: QuadratureConfig = DEFAULT_CONFIG):
        self.body = body
        self.cfg = cfg

    def __call__(self, X, T) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, float))
        T = np.asarray(T, float).reshape(-1)
        if isinstance(self.body, Ellipsoid) and self.cfg.method in ("auto", "exact"):
            v = _ellipsoid_values(self.body, X, T)
            bm, bp = self.interval(X)
            return np.where((T > bm) & (T < bp), v, 0.0)
        return np.array([section_values(self.body, x, [t], self.cfg, clamp=False)[0][0]
                         for x, t in zip(X, T)])

    def interval(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        return -support(self.body, -X), support(self.body, X)


@dataclass(frozen=True)
class InversionResult:
    value: float
    near_boundary: bool


def _frame(x: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(x)
    axis = x / r if r > 0 else np.array([0.0, 0.0, 1.0])
    return np.vstack([axis, _plane_basis(axis)])


def _crossings(G: Callable[[np.ndarray, np.ndarray], np.ndarray], n_psi: int, scan: int = 513,
               iters: int = 55) -> list[np.ndarray]:
    """Roots in z of ``G(z, psi_index)`` for each azimuth, by scan plus vectorized bisection."""
    z = np.linspace(-1.0, 1.0, scan)
    zz = np.tile(z, n_psi)
    ii = np.repeat(np.arange(n_psi), scan)
    g = G(zz, ii).reshape(n_psi, scan)
    sgn = np.sign(g)
    ip, iz = np.nonzero(sgn[:, :-1] * sgn[:, 1:] < 0)
    lo, hi = z[iz], z[iz + 1]
    glo = g[ip, iz]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = G(mid, ip)
        left = np.sign(gm) == np.sign(glo)
        lo = np.where(left, mid, lo)
        glo = np.where(left, gm, glo)
        hi = np.where(left, hi, mid)
    roots = 0.5 * (lo + hi)
    exact = np.nonzero(sgn[:, 1:-1] == 0)
    out = [[] for _ in range(n_psi)]
    for i, r in zip(ip, roots):
        out[i].append(r)
    for i, j in zip(*exact):
        out[i].append(z[j + 1])
    return [np.array(sorted(o)) for o in out]


def invert_radon_3d(sampler, x, grid: DirectionGrid | None = None, *,
                    h_fd: float | None = None, rel_step: float = 1e-3,
                    n_psi: int = 64, nodes: int = 20) -> InversionResult:
    """Back-projection ``-1/(8 pi^2) ∫_{S^2} d^2/dt^2 A(xi, <x, xi>) dS(xi)``.

    ``sampler(X, T)`` evaluates A row-wise and the t-derivative is a centered
    second difference. If ``sampler`` has an ``interval`` method the step is
    ``rel_step`` times each direction's width, and the sphere integral uses a
    product rule with its polar axis along ``x``: trapezoid in azimuth and
    Gauss-Legendre panels in ``z = <xi, x/|x|>`` broken wherever a stencil
    point crosses a tangency offset. That resolves the jumps of ``dA/dt`` at
    tangency, which a fixed grid smears. ``near_boundary`` is raised when x
    lies within five steps of the boundary. Without ``interval`` the fixed product
    ``grid`` is used with step ``h_fd`` (default 1e-3).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError("back-projection is implemented for n = 3 only")
    interval = getattr(sampler, "interval", None)
    if interval is None:
        grid = grid or sphere_grid(32, 64)
        X = grid.points
        s = X @ x
        h = np.full(s.size, 1e-3 if h_fd is None else h_fd)
        vals = sampler(np.vstack([X, X, X]), np.concatenate([s - h, s, s + h]))
        m = s.size
        d2 = (vals[:m] - 2.0 * vals[m:2 * m] + vals[2 * m:]) / h**2
        return InversionResult(INVERSION_CONSTANT_3D * float(np.sum(grid.weights * d2)), False)

    F = _frame(x)
    r = float(np.linalg.norm(x))
    psi = 2.0 * np.pi * np.arange(n_psi) / n_psi
    ring = np.cos(psi)[:, None] * F[1] + np.sin(psi)[:, None] * F[2]

    def dirs(z, ip):
        return z[:, None] * F[0] + np.sqrt(np.clip(1.0 - z**2, 0.0, None))[:, None] * ring[ip]

    def step(bm, bp):
        return rel_step * (bp - bm) if h_fd is None else np.full(bm.shape, float(h_fd))

    def G(sigma, upper):
        def g(z, ip):
            bm, bp = interval(dirs(z, ip))
            return r * z + sigma * step(bm, bp) - (bp if upper else bm)
        return g

    cuts = [[np.array([-1.0, 1.0])] for _ in range(n_psi)]
    for sigma in (-1.0, 0.0, 1.0):
        for upper in (False, True):
            for i, c in enumerate(_crossings(G(sigma, upper), n_psi)):
                cuts[i].append(c)
    gx, gw = gauss_legendre(nodes)
    Z, W, IP = [], [], []
    for i in range(n_psi):
        e = np.unique(np.concatenate(cuts[i]))
        a, b = e[:-1], e[1:]
        keep = b - a > 1e-14
        a, b = a[keep], b[keep]
        Z.append((0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * gx[None, :]).ravel())
        W.append((0.5 * (b - a)[:, None] * gw[None, :]).ravel())
        IP.append(np.full(Z[-1].size, i))
    Z, W, IP = np.concatenate(Z), np.concatenate(W), np.concatenate(IP)
    X = dirs(Z, IP)
    s = r * Z
    bm, bp = interval(X)
    h = step(bm, bp)
    # signed distance from x to the boundary: max over xi of <x, xi> - h(xi)
    signed = float(np.max(np.maximum(s - bp, bm - s)))
    near = abs(signed) < 5.0 * float(h.max())
    m = s.size
    vals = sampler(np.vstack([X, X, X]), np.concatenate([s - h, s, s + h]))
    d2 = (vals[:m] - 2.0 * vals[m:2 * m] + vals[2 * m:]) / h**2
    total = float(np.sum(W * d2)) * 2.0 * np.pi / n_psi
    return InversionResult(INVERSION_CONSTANT_3D * total, near)


# ------------------------------------------------------- local profiles


def local_section_profile(body: Body, a, t_grid, cfg: QuadratureConfig = DEFAULT_CONFIG) -> SectionProfile:
    """Sections by the planes ``T_a(dK) + t nu_a`` with ``nu_a`` the inward normal.

    The returned profile is expressed in the inward direction, so its
    offsets are ``<a, nu_a> + t`` and sit just above ``b_minus``.
    """
    a = np.asarray(a, dtype=float)
    centered = translate(body, -body.reference_point)
    if abs(minkowski_functional(centered, a - body.reference_point) - 1.0) > 1e-8:
        raise BodyError("point is not on the boundary")
    nu_in = -outward_normal(body, a)
    t = np.asarray(t_grid, dtype=float)
    offsets = a @ nu_in + t
    vals, errs = section_values(body, nu_in, offsets, cfg, clamp=False)
    bm, bp = support_interval(body, nu_in)
    return SectionProfile(nu_in, offsets, vals, errs, bm, bp)
