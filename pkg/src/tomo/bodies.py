"""Convex body representations and the support / gauge calculus.

Four concrete representations are provided: :class:`Ellipsoid`,
:class:`Polytope` (H-representation), :class:`LpBall` and
:class:`OracleBody` (membership predicate plus support evaluator). All of
them are immutable; the module-level functions dispatch on type.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Union

import numpy as np
from scipy.optimize import linprog

UNIT_TOL = 1e-12
_BOUNDARY_TOL = 1e-12


class BodyError(ValueError):
    """Raised for geometrically invalid bodies or requests."""


class BodySpecError(ValueError):
    """Raised when a JSON body specification cannot be parsed."""


def _frozen(a: Any, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def as_direction(xi: Any) -> np.ndarray:
    """Validate a unit direction (norm 1 within 1e-12, dimension >= 2)."""
    v = np.asarray(xi, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("direction must be a vector of dimension >= 2")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must have unit norm (got |xi| = {nrm!r})")
    return v


def normalize(xi: Any) -> np.ndarray:
    v = np.asarray(xi, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("zero direction")
    return v / nrm


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """``{x : (x - c)^T A^{-1} (x - c) <= 1}`` for SPD ``A``."""

    shape: np.ndarray
    center: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        A = np.array(self.shape, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
            raise BodyError("ellipsoid shape must be a square matrix of size >= 2")
        scale = max(1.0, np.abs(A).max())
        if np.abs(A - A.T).max() > UNIT_TOL * scale:
            raise BodyError("ellipsoid shape must be symmetric")
        A = 0.5 * (A + A.T)
        evals, evecs = np.linalg.eigh(A)
        if evals.min() <= 0:
            raise BodyError("ellipsoid shape must be positive definite")
        c = np.zeros(A.shape[0]) if self.center is None else np.asarray(self.center, float)
        if c.shape != (A.shape[0],):
            raise BodyError("ellipsoid center has the wrong dimension")
        object.__setattr__(self, "shape", _frozen(A))
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "_inv", _frozen(np.linalg.inv(A)))
        object.__setattr__(self, "_sqrt", _frozen((evecs * np.sqrt(evals)) @ evecs.T))
        object.__setattr__(self, "_evals", _frozen(evals))

    @property
    def dim(self) -> int:
        return self.shape.shape[0]

    @property
    def bounding_radius(self) -> float:
        return float(np.sqrt(self._evals.max()))

    @property
    def reference_point(self) -> np.ndarray:
        return self.center

    @property
    def sqrt_shape(self) -> np.ndarray:
        """Symmetric square root ``L`` with ``E = c + L(B^n)``."""
        return self._sqrt

    @property
    def inverse_shape(self) -> np.ndarray:
        return self._inv


@dataclass(frozen=True, eq=False)
class Polytope:
    """``{x : <a_i, x> <= b_i}``.

    The vertex list is cached for n = 2, 3 by intersecting every n-subset of
    facets; in higher dimensions support values come from a linear program.
    """

    normals: np.ndarray
    offsets: np.ndarray
    vertices: np.ndarray | None = field(init=False, default=None)
    chebyshev_center: np.ndarray = field(init=False, default=None)  # type: ignore[assignment]
    inradius: float = field(init=False, default=0.0)

    def __post_init__(self):
        A = np.array(self.normals, dtype=float)
        b = np.array(self.offsets, dtype=float)
        if A.ndim != 2 or A.shape[1] < 2 or b.shape != (A.shape[0],):
            raise BodyError("polytope halfspaces are malformed")
        if np.any(np.linalg.norm(A, axis=1) == 0):
            raise BodyError("polytope halfspace with zero normal")
        n = A.shape[1]
        for i in range(n):
            for s in (1.0, -1.0):
                c = np.zeros(n)
                c[i] = -s
                res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
                if res.status == 3:
                    raise BodyError("unbounded body")
                if res.status == 2:
                    raise BodyError("empty polytope")
        # Chebyshev center: max r s.t. a_i x + r |a_i| <= b_i
        norms = np.linalg.norm(A, axis=1)
        res = linprog(
            np.r_[np.zeros(n), -1.0],
            A_ub=np.column_stack([A, norms]),
            b_ub=b,
            bounds=[(None, None)] * n + [(0, None)],
            method="highs",
        )
        if res.status != 0 or res.x[-1] <= 1e-12:
            raise BodyError("polytope has empty interior")
        object.__setattr__(self, "normals", _frozen(A))
        object.__setattr__(self, "offsets", _frozen(b))
        object.__setattr__(self, "chebyshev_center", _frozen(res.x[:n]))
        object.__setattr__(self, "inradius", float(res.x[-1]))
        if n <= 3:
            object.__setattr__(self, "vertices", _frozen(_enumerate_vertices(A, b)))

    @classmethod
    def from_halfspaces(cls, halfspaces) -> "Polytope":
        A = [h[0] for h in halfspaces]
        b = [h[1] for h in halfspaces]
        return cls(A, b)

    @classmethod
    def box(cls, lo, hi) -> "Polytope":
        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        eye = np.eye(lo.size)
        return cls(np.vstack([eye, -eye]), np.r_[hi, -lo])

    @classmethod
    def regular_polygon(cls, m: int, circumradius: float = 1.0, phase: float = 0.0) -> "Polytope":
        ang = phase + 2 * np.pi * (np.arange(m) + 0.5) / m
        normals = np.column_stack([np.cos(ang), np.sin(ang)])
        return cls(normals, np.full(m, circumradius * np.cos(np.pi / m)))

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def reference_point(self) -> np.ndarray:
        return self.chebyshev_center

    @property
    def bounding_radius(self) -> float:
        if self.vertices is not None:
            return float(np.linalg.norm(self.vertices - self.chebyshev_center, axis=1).max())
        n = self.dim
        ext = [support(self, s * e) for e in np.eye(n) for s in (1.0, -1.0)]
        half = 0.5 * (np.asarray(ext[0::2]) + np.asarray(ext[1::2]))
        return float(np.linalg.norm(half))


def _enumerate_vertices(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = A.shape[1]
    scale = max(1.0, np.abs(b).max())
    verts = []
    for idx in itertools.combinations(range(A.shape[0]), n):
        M = A[list(idx)]
        if abs(np.linalg.det(M)) < 1e-12 * np.prod(np.linalg.norm(M, axis=1)):
            continue
        v = np.linalg.solve(M, b[list(idx)])
        if np.all(A @ v <= b + 1e-9 * scale):
            if not any(np.linalg.norm(v - w) < 1e-9 * scale for w in verts):
                verts.append(v)
    return np.array(verts)


@dataclass(frozen=True, eq=False)
class LpBall:
    """``{x : sum |(x_i - c_i) / r_i|^p <= 1}`` with ``p >= 1``."""

    p: float
    semiaxes: np.ndarray
    center: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        r = np.array(self.semiaxes, dtype=float)
        if r.ndim != 1 or r.size < 2:
            raise BodyError("lpball semiaxes must be a vector of dimension >= 2")
        if not self.p >= 1.0:
            raise BodyError("lpball exponent p must be >= 1")
        if np.any(r <= 0):
            raise BodyError("lpball semiaxes must be positive")
        c = np.zeros(r.size) if self.center is None else np.asarray(self.center, float)
        if c.shape != r.shape:
            raise BodyError("lpball center has the wrong dimension")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "semiaxes", _frozen(r))
        object.__setattr__(self, "center", _frozen(c))

    @property
    def dim(self) -> int:
        return self.semiaxes.size

    @property
    def bounding_radius(self) -> float:
        return float(np.linalg.norm(self.semiaxes))

    @property
    def reference_point(self) -> np.ndarray:
        return self.center

    @property
    def dual_exponent(self) -> float:
        return np.inf if self.p == 1.0 else self.p / (self.p - 1.0)

    def gauge(self, x: np.ndarray) -> np.ndarray:
        """``sum |(x - c)/r|^p`` along the last axis (<= 1 inside)."""
        y = np.abs((np.asarray(x, float) - self.center) / self.semiaxes)
        return np.sum(y**self.p, axis=-1)


@dataclass(frozen=True, eq=False)
class OracleBody:
    """Body given only by callables.

    ``membership(x)`` must accept an ``(..., n)`` array and return booleans;
    ``support_fn(xi)`` must accept an ``(..., n)`` array of (not necessarily
    unit) directions and return the homogeneous support values.
    """

    dim: int
    membership_fn: Callable[[np.ndarray], np.ndarray]
    support_fn: Callable[[np.ndarray], np.ndarray]
    bounding_radius: float
    reference_point: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        rp = np.zeros(self.dim) if self.reference_point is None else np.asarray(self.reference_point, float)
        object.__setattr__(self, "reference_point", _frozen(rp))


Body = Union[Ellipsoid, Polytope, LpBall, OracleBody]


def ball(n: int, radius: float = 1.0, center=None) -> Ellipsoid:
    return Ellipsoid(radius**2 * np.eye(n), center)


# ---------------------------------------------------------------- support


def support(body: Body, xi: Any) -> Any:
    """Support function ``h(xi) = sup <x, xi>``, homogeneous of degree 1.

    ``xi`` may be a single vector or an ``(m, n)`` array; the result is a
    float or an ``(m,)`` array accordingly.
    """
    x = np.asarray(xi, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != body.dim:
        raise ValueError("direction dimension does not match body")
    if isinstance(body, Ellipsoid):
        out = np.sqrt(np.einsum("ij,jk,ik->i", X, body.shape, X)) + X @ body.center
    elif isinstance(body, Polytope):
        if body.vertices is not None:
            out = (X @ body.vertices.T).max(axis=1)
        else:
            out = np.array([_lp_support(body, row) for row in X])
    elif isinstance(body, LpBall):
        eta = np.abs(X * body.semiaxes)
        q = body.dual_exponent
        dual = eta.max(axis=1) if np.isinf(q) else np.sum(eta**q, axis=1) ** (1.0 / q)
        out = dual + X @ body.center
    elif isinstance(body, OracleBody):
        out = np.asarray(body.support_fn(X), dtype=float).reshape(-1)
    else:
        raise TypeError(f"not a body: {type(body).__name__}")
    return float(out[0]) if single else out


def _lp_support(body: Polytope, xi: np.ndarray) -> float:
    res = linprog(-xi, A_ub=body.normals, b_ub=body.offsets,
                  bounds=[(None, None)] * body.dim, method="highs")
    if res.status == 3:
        raise BodyError("unbounded body")
    return float(-res.fun)


def support_translated(body: Body, a: Any, xi: Any) -> Any:
    """Support of ``body + a``: ``h(xi) + <a, xi>``."""
    return support(body, xi) + np.asarray(xi, float) @ np.asarray(a, float)


def support_interval(body: Body, xi: Any) -> tuple[float, float]:
    """``(b_minus, b_plus) = (-h(-xi), h(xi))``."""
    v = np.asarray(xi, float)
    b_plus = support(body, v)
    b_minus = -support(body, -v)
    if b_plus - b_minus < 1e-12:
        raise BodyError("degenerate width")
    return b_minus, b_plus


def support_point(body: Body, xi: Any) -> np.ndarray:
    """A maximizer of ``<x, xi>`` over the body (not defined for oracles)."""
    v = np.asarray(xi, float)
    if isinstance(body, Ellipsoid):
        Av = body.shape @ v
        return body.center + Av / np.sqrt(v @ Av)
    if isinstance(body, LpBall):
        eta = body.semiaxes * v
        if body.p == 1.0:
            u = np.zeros_like(eta)
            i = int(np.argmax(np.abs(eta)))
            u[i] = np.sign(eta[i])
        else:
            q = body.dual_exponent
            nq = np.sum(np.abs(eta) ** q) ** (1.0 / q)
            u = np.sign(eta) * (np.abs(eta) / nq) ** (q - 1.0)
        return body.center + body.semiaxes * u
    if isinstance(body, Polytope):
        if body.vertices is None:
            res = linprog(-v, A_ub=body.normals, b_ub=body.offsets,
                          bounds=[(None, None)] * body.dim, method="highs")
            return res.x
        return body.vertices[np.argmax(body.vertices @ v)]
    raise BodyError("support point not available for oracle bodies")


# ------------------------------------------------------------- membership


def membership(body: Body, x: Any) -> Any:
    """Closed-set membership test; vectorized over leading axes."""
    X = np.asarray(x, dtype=float)
    if isinstance(body, Ellipsoid):
        d = X - body.center
        out = np.einsum("...i,ij,...j->...", d, body.inverse_shape, d) <= 1.0 + _BOUNDARY_TOL
    elif isinstance(body, Polytope):
        slack = body.offsets + _BOUNDARY_TOL * np.maximum(1.0, np.abs(body.offsets))
        out = np.all(X @ body.normals.T <= slack, axis=-1)
    elif isinstance(body, LpBall):
        out = body.gauge(X) <= 1.0 + _BOUNDARY_TOL
    elif isinstance(body, OracleBody):
        out = np.asarray(body.membership_fn(X), dtype=bool)
    else:
        raise TypeError(f"not a body: {type(body).__name__}")
    return bool(out) if np.ndim(out) == 0 else out


def _origin_interior(body: Body) -> bool:
    n = body.dim
    if isinstance(body, Ellipsoid):
        c = body.center
        return float(c @ body.inverse_shape @ c) < 1.0
    if isinstance(body, Polytope):
        return bool(np.all(body.offsets > 0))
    if isinstance(body, LpBall):
        return float(body.gauge(np.zeros(n))) < 1.0
    delta = 1e-9 * body.bounding_radius
    probes = np.vstack([np.zeros(n), delta * np.eye(n), -delta * np.eye(n)])
    return bool(np.all(membership(body, probes)))


def minkowski_functional(body: Body, x: Any, rtol: float = 1e-10, max_iter: int = 80) -> float:
    """Gauge ``inf{lam > 0 : x / lam in K}``; requires 0 in the interior."""
    if not _origin_interior(body):
        raise BodyError("origin outside interior")
    v = np.asarray(x, dtype=float)
    r = np.linalg.norm(v)
    if r == 0.0:
        return 0.0
    if isinstance(body, Ellipsoid) and not np.any(body.center):
        return float(np.sqrt(v @ body.inverse_shape @ v))
    if isinstance(body, Polytope):
        return float(np.max(body.normals @ v / body.offsets))
    if isinstance(body, LpBall) and not np.any(body.center):
        return float(np.sum(np.abs(v / body.semiaxes) ** body.p) ** (1.0 / body.p))
    # bisection on the scale s with s*x in K; s*x leaves K beyond 2R/|x|
    lo, hi = 0.0, 2.0 * body.bounding_radius / r
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if membership(body, mid * v):
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return float(2.0 / (lo + hi))


def outward_normal(body: Body, a: Any, tol: float = 1e-8) -> np.ndarray:
    """Unit outward normal at a boundary point."""
    x = np.asarray(a, dtype=float)
    if isinstance(body, Ellipsoid):
        g = body.inverse_shape @ (x - body.center)
    elif isinstance(body, LpBall):
        y = (x - body.center) / body.semiaxes
        if body.p == 1.0 and np.any(np.abs(y) < tol):
            raise BodyError("no unique normal")
        g = np.sign(y) * np.abs(y) ** (body.p - 1.0) / body.semiaxes
    elif isinstance(body, Polytope):
        scale = np.maximum(1.0, np.abs(body.offsets))
        active = np.abs(body.normals @ x - body.offsets) <= tol * scale
        if active.sum() != 1:
            raise BodyError("no unique normal")
        g = body.normals[active][0]
    else:
        raise BodyError("no unique normal")
    return g / np.linalg.norm(g)


def translate(body: Body, a: Any) -> Body:
    a = np.asarray(a, dtype=float)
    if isinstance(body, Ellipsoid):
        return Ellipsoid(body.shape, body.center + a)
    if isinstance(body, Polytope):
        return Polytope(body.normals, body.offsets + body.normals @ a)
    if isinstance(body, LpBall):
        return LpBall(body.p, body.semiaxes, body.center + a)
    return OracleBody(
        body.dim,
        lambda x, f=body.membership_fn: f(np.asarray(x) - a),
        lambda xi, f=body.support_fn: np.asarray(f(xi)) + np.asarray(xi) @ a,
        body.bounding_radius,
        body.reference_point + a,
    )


def random_ellipsoid(rng: np.random.Generator, n: int, axes=(0.6, 1.6), center_scale: float = 0.5) -> Ellipsoid:
    """Random rotation of a diagonal ellipsoid with semi-axes in ``axes``."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    semi = rng.uniform(*axes, size=n)
    A = (Q * semi**2) @ Q.T
    return Ellipsoid(0.5 * (A + A.T), center_scale * rng.uniform(-1, 1, size=n))


# --------------------------------------------------------------- JSON I/O


def _field(d: dict, name: str, kind: str):
    if name not in d:
        raise BodySpecError(f"field '{name}': missing for {kind} body")
    return d[name]


def _vector(value, name: str, n: int | None = None) -> np.ndarray:
    try:
        v = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise BodySpecError(f"field '{name}': expected a list of numbers") from None
    if v.ndim != 1 or (n is not None and v.size != n):
        raise BodySpecError(f"field '{name}': expected a vector of length {n or 'n'}")
    if not np.all(np.isfinite(v)):
        raise BodySpecError(f"field '{name}': non-finite entry")
    return v


def body_from_dict(d: dict) -> Body:
    if not isinstance(d, dict):
        raise BodySpecError("body spec must be a JSON object")
    kind = d.get("type")
    try:
        if kind == "ellipsoid":
            raw = _field(d, "shape", kind)
            try:
                A = np.asarray(raw, dtype=float)
            except (TypeError, ValueError):
                raise BodySpecError("field 'shape': expected a square matrix") from None
            if A.ndim != 2 or A.shape[0] != A.shape[1]:
                raise BodySpecError("field 'shape': expected a square matrix")
            c = _vector(d.get("center", np.zeros(A.shape[0])), "center", A.shape[0])
            try:
                return Ellipsoid(A, c)
            except BodyError as e:
                raise BodySpecError(f"field 'shape': {e}") from None
        if kind == "polytope":
            hs = _field(d, "halfspaces", kind)
            if not isinstance(hs, list) or not hs:
                raise BodySpecError("field 'halfspaces': expected a non-empty list")
            normals, offsets = [], []
            for i, h in enumerate(hs):
                if not isinstance(h, dict) or "a" not in h or "b" not in h:
                    raise BodySpecError(f"field 'halfspaces[{i}]': expected an object with 'a' and 'b'")
                normals.append(_vector(h["a"], f"halfspaces[{i}].a", None))
                try:
                    offsets.append(float(h["b"]))
                except (TypeError, ValueError):
                    raise BodySpecError(f"field 'halfspaces[{i}].b': expected a number") from None
            if len({v.size for v in normals}) != 1:
                raise BodySpecError("field 'halfspaces': normals of differing dimension")
            try:
                return Polytope(np.array(normals), np.array(offsets))
            except BodyError as e:
                raise BodySpecError(f"field 'halfspaces': {e}") from None
        if kind == "lpball":
            try:
                p = float(_field(d, "p", kind))
            except (TypeError, ValueError):
                raise BodySpecError("field 'p': expected a number") from None
            r = _vector(_field(d, "semiaxes", kind), "semiaxes")
            c = _vector(d.get("center", np.zeros(r.size)), "center", r.size)
            if p < 1:
                raise BodySpecError("field 'p': must be >= 1")
            if np.any(r <= 0):
                raise BodySpecError("field 'semiaxes': entries must be positive")
            return LpBall(p, r, c)
    except BodySpecError:
        raise
    raise BodySpecError(f"field 'type': unknown body type {kind!r}")


def body_to_dict(body: Body) -> dict:
    if isinstance(body, Ellipsoid):
        return {"type": "ellipsoid", "shape": body.shape.tolist(), "center": body.center.tolist()}
    if isinstance(body, Polytope):
        return {"type": "polytope",
                "halfspaces": [{"a": a.tolist(), "b": float(b)} for a, b in zip(body.normals, body.offsets)]}
    if isinstance(body, LpBall):
        return {"type": "lpball", "p": body.p, "semiaxes": body.semiaxes.tolist(), "center": body.center.tolist()}
    raise TypeError("oracle bodies have no JSON form")


def load_body(path: str | Path) -> Body:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise BodySpecError(f"cannot read body spec: {e}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise BodySpecError(f"body spec is not valid JSON: {e}") from None
    return body_from_dict(d)
