"""Moment functions, range conditions and the tangent-measure systems.

For a body K the offset moments ``M_k(xi) = ∫ A_K(xi, t) t^k dt`` extend to
homogeneous polynomials of degree k in xi. A density ``q`` placed on the
two supporting hyperplanes produces moments

    p_k(xi) = q h^k + (-1)^k q' h'^k,   h = h(xi), h' = h(-xi), q' = q(-xi)

which obey the two-term recurrence ``S P_k = P_{k+1}`` with
``P_k = (p_k, p_{k+1})``. The order-one system (densities on the planes and
their normal derivatives) obeys the analogous four-term recurrence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .bodies import Body, support, translate
from .grids import DirectionGrid, default_grid
from .reports import DetectionReport
from .sections import DEFAULT_CONFIG, QuadratureConfig, integrate_offsets

DEFAULT_RANGE_TOL = 1e-6
DEFAULT_DETECT_TOL = 1e-7
DEGENERACY_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Values of a degree-k moment function on an antipodally closed grid.

    ``scale`` is the natural magnitude used to normalize residuals when the
    values themselves may vanish identically (odd moments of symmetric
    bodies).
    """

    k: int
    grid: DirectionGrid
    values: np.ndarray
    scale: float | None = None

    def rows(self):
        for xi, v in zip(self.grid.points, self.values):
            yield [*xi.tolist(), self.k, float(v)]


@dataclass
class HomogeneousFitReport:
    k: int
    coefficients: np.ndarray
    exponents: list[tuple[int, ...]]
    relative_residual: float
    parity_residual: float
    verdict: str

    def evaluate(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, float))
        return _monomials(X, self.exponents) @ self.coefficients

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "coefficients": {"".join(map(str, e)): float(c) for e, c in zip(self.exponents, self.coefficients)},
            "relative_residual": self.relative_residual,
            "parity_residual": self.parity_residual,
            "verdict": self.verdict,
        }


def monomial_exponents(n: int, k: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree k in n variables (graded lex)."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n), k):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def _monomials(X: np.ndarray, exps) -> np.ndarray:
    return np.column_stack([np.prod(X ** np.array(e), axis=1) for e in exps])


# ------------------------------------------------------------- moments


def moments(body: Body, xi, kmax: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``[M_0(xi), ..., M_kmax(xi)]`` from one vector-valued offset quadrature."""
    ks = np.arange(kmax + 1)
    return np.asarray(integrate_offsets(body, xi, lambda t, A: A[:, None] * t[:, None] ** ks[None, :], cfg=cfg),
                      dtype=float)


def moment(body: Body, xi, k: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    if k < 0:
        raise ValueError("moment degree must be >= 0")
    return float(moments(body, xi, k, cfg)[k])


def moment_tables(body: Body, kmax: int, grid: DirectionGrid | None = None,
                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[MomentTable]:
    """Tables ``M_0 .. M_kmax`` over a direction grid."""
    grid = grid or default_grid(body.dim)
    vals = np.array([moments(body, xi, kmax, cfg) for xi in grid.points])
    vol = float(np.median(vals[:, 0]))
    R = body.bounding_radius + float(np.linalg.norm(body.reference_point))
    return [MomentTable(k, grid, vals[:, k], scale=vol * R**k) for k in range(kmax + 1)]


class RankError(ValueError):
    pass


def fit_homogeneous(table: MomentTable, tol: float = DEFAULT_RANGE_TOL) -> HomogeneousFitReport:
    """Least-squares fit of the table by a degree-k homogeneous polynomial.

    The parity component opposite to ``(-1)^k`` is checked first and must
    vanish; the remaining component is then fitted against all degree-k
    monomials.
    """
    grid, k = table.grid, table.k
    exps = monomial_exponents(grid.dim, k)
    if len(grid) < 3 * len(exps):
        raise RankError("enlarge direction grid")
    v = np.asarray(table.values, float)
    vr = v[grid.antipode]
    even, odd = 0.5 * (v + vr), 0.5 * (v - vr)
    keep, drop = (even, odd) if k % 2 == 0 else (odd, even)
    denom = max(float(np.abs(v).max()), float(table.scale or 0.0))
    if denom == 0.0:
        denom = 1.0
    parity_res = float(np.abs(drop).max()) / denom
    V = _monomials(grid.points, exps)
    coef, _, rank, _ = np.linalg.lstsq(V, keep, rcond=None)
    if rank < len(exps):
        raise RankError("enlarge direction grid")
    fit_res = float(np.abs(keep - V @ coef).max()) / denom
    rel = max(parity_res, fit_res)
    verdict = "polynomial" if rel < tol else "not-polynomial"
    return HomogeneousFitReport(k, coef, exps, rel, parity_res, verdict)


# ------------------------------------------------------ tangent measure


@dataclass(frozen=True, eq=False)
class TangentMeasure:
    """Order-zero tangent measure: density ``q`` and support values ``h``."""

    grid: DirectionGrid
    q: np.ndarray
    h: np.ndarray

    @property
    def q_check(self) -> np.ndarray:
        return self.q[self.grid.antipode]

    @property
    def h_check(self) -> np.ndarray:
        return self.h[self.grid.antipode]


def tangent_measure(body: Body, grid: DirectionGrid | None = None, q=1.0) -> TangentMeasure:
    """Tangent measure of ``body`` with density ``q`` (scalar, array or callable)."""
    grid = grid or default_grid(body.dim)
    h = np.asarray(support(body, grid.points), float)
    if callable(q):
        qv = np.asarray(q(grid.points), float)
    else:
        qv = np.broadcast_to(np.asarray(q, float), h.shape).copy()
    return TangentMeasure(grid, qv, h)


def tangent_moments(tm: TangentMeasure, k: int) -> MomentTable:
    """``p_k = q h^k + (-1)^k q' h'^k`` pointwise."""
    vals = tm.q * tm.h**k + (-1) ** k * tm.q_check * tm.h_check**k
    return MomentTable(k, tm.grid, vals)


def build_S_order0(h, hc) -> np.ndarray:
    return np.array([[0.0, 1.0], [h * hc, h - hc]])


def build_T_order0(h, hc) -> np.ndarray:
    return np.array([[h, 0.0], [0.0, -hc]])


def build_M_order0(h, hc, k: int) -> np.ndarray:
    """Rows k, k+1 of the order-zero system matrix."""
    return np.array([[h**j, (-hc) ** j] for j in (k, k + 1)])


def order1_row(h, hc, j: int) -> np.ndarray:
    """Row j of the order-one system acting on ``(q0, q1, q0', q1')``."""
    return np.array([
        h**j,
        -j * h ** (j - 1) if j else 0.0,
        (-hc) ** j,
        -j * (-hc) ** (j - 1) if j else 0.0,
    ])


def build_M_order1(h, hc, k: int) -> np.ndarray:
    return np.vstack([order1_row(h, hc, j) for j in range(k, k + 4)])


def order1_sigmas(h, hc) -> tuple[float, float, float, float]:
    """Coefficients of ``(x - h)^2 (x + h')^2 = x^4 - s1 x^3 + s2 x^2 - s3 x + s4``."""
    s1 = 2.0 * (h - hc)
    s2 = h**2 - 4.0 * h * hc + hc**2
    s3 = -2.0 * h * hc * (h - hc)
    s4 = h**2 * hc**2
    return s1, s2, s3, s4


def build_S_order1(h, hc) -> np.ndarray:
    """Companion matrix advancing ``(p_k, .., p_{k+3})`` by one step."""
    s1, s2, s3, s4 = order1_sigmas(h, hc)
    S = np.zeros((4, 4))
    S[0, 1] = S[1, 2] = S[2, 3] = 1.0
    S[3] = [-s4, s3, -s2, s1]
    return S


def build_T_order1(h, hc) -> np.ndarray:
    """Jordan blocks with ``M_{k+1} = M_k T`` for the rows of :func:`order1_row`."""
    return np.array([[h, -1.0, 0.0, 0.0], [0.0, h, 0.0, 0.0], [0.0, 0.0, -hc, -1.0], [0.0, 0.0, 0.0, -hc]])


def order1_moments(h, hc, q0, q1, q0c, q1c, kmax: int) -> np.ndarray:
    """``p_0 .. p_kmax`` of an order-one tangent measure (arrays broadcast)."""
    Q = np.stack(np.broadcast_arrays(q0, q1, q0c, q1c))
    return np.array([np.einsum("i...,i...->...", np.stack(np.broadcast_arrays(*order1_row(h, hc, j))), Q)
                     for j in range(kmax + 1)])


def geometric_series_check(tables: list[MomentTable], h, hc) -> float:
    """``max |S P_k - P_{k+1}|`` over the grid and ``k = 0 .. K-2``."""
    if len(tables) < 4:
        raise ValueError("need tables p_0 .. p_K with K >= 3")
    P = np.array([t.values for t in tables])
    h = np.asarray(h, float)
    hc = np.asarray(hc, float)
    dev = 0.0
    for k in range(len(tables) - 2):
        nxt = h * hc * P[k] + (h - hc) * P[k + 1]
        dev = max(dev, float(np.abs(nxt - P[k + 2]).max()))
    return dev


@dataclass
class SupportProductRecovery:
    values: np.ndarray
    degenerate: np.ndarray
    det01: np.ndarray


def recover_support_product(tables: list[MomentTable], floor: float = DEGENERACY_FLOOR) -> SupportProductRecovery:
    """``h h' = -det(P_1, P_2) / det(P_0, P_1)`` per direction.

    Directions with ``|det(P_0, P_1)| <= floor`` (vanishing ``q q'``) are
    flagged degenerate and carry NaN.
    """
    if len(tables) < 4:
        raise ValueError("need tables p_0 .. p_3")
    p0, p1, p2, p3 = (np.asarray(t.values, float) for t in tables[:4])
    d01 = p0 * p2 - p1**2
    d12 = p1 * p3 - p2**2
    bad = np.abs(d01) <= floor
    with np.errstate(divide="ignore", invalid="ignore"):
        est = np.where(bad, np.nan, -d12 / np.where(bad, 1.0, d01))
    return SupportProductRecovery(est, bad, d01)


# ------------------------------------------------------------ detection


def support_product_table(body: Body, a, grid: DirectionGrid) -> MomentTable:
    """``h_{K+a}(xi) h_{K+a}(-xi)`` as a degree-2 table."""
    h = np.asarray(support(translate(body, a), grid.points), float)
    return MomentTable(2, grid, h * h[grid.antipode])


def support_product_quadratic_test(body: Body, translates, grid: DirectionGrid | None = None,
                                   tol: float = DEFAULT_DETECT_TOL) -> DetectionReport:
    """Fit ``h_{K+a}(xi) h_{K+a}(-xi)`` by a quadratic form for each translate."""
    trans = [np.asarray(a, float) for a in translates]
    if len(trans) < 3 or not any(not np.any(a) for a in trans):
        raise ValueError("need at least 3 translates including 0")
    grid = grid or default_grid(body.dim)
    items = []
    for a in trans:
        rep = fit_homogeneous(support_product_table(body, a, grid), tol)
        items.append({
            "translate": a.tolist(),
            "relative_residual": rep.relative_residual,
            "form": rep.to_dict()["coefficients"],
            "verdict": "quadratic" if rep.verdict == "polynomial" else "not-quadratic",
        })
    ok = all(it["verdict"] == "quadratic" for it in items)
    return DetectionReport(
        test="support-product-quadratic",
        verdict="ellipsoid" if ok else "not-ellipsoid",
        residual=max(it["relative_residual"] for it in items),
        items=items,
        params={"tol": tol, "grid": len(grid)},
    )


def default_translates(body: Body) -> list[np.ndarray]:
    n = body.dim
    r = body.bounding_radius
    e1, e2 = np.eye(n)[0], np.eye(n)[1]
    return [np.zeros(n), e1 * r / 4, (e1 + e2) * r / 4, -e2 * r / 3]


def detect_ellipsoid(body: Body, grid: DirectionGrid | None = None, tol: float = DEFAULT_DETECT_TOL,
                     translates=None) -> DetectionReport:
    """Decide whether ``body`` is an ellipsoid from translated support products."""
    grid = grid or default_grid(body.dim)
    rep = support_product_quadratic_test(body, translates or default_translates(body), grid, tol)
    rep.test = "detect-ellipsoid"
    return rep
