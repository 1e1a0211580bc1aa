"""Command-line entry point: ``tomo <command> --body spec.json [options]``.

Exit status is 0 on success, 1 on errors or bad usage, and 2 when
``--expect`` names a verdict the run did not produce.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import asymptotics, harmonics, moments, polyalg, sections
from .bodies import (Body, BodyError, BodySpecError, load_body, normalize, support,
                     support_interval)
from .grids import circle_grid, sphere_grid
from .reports import DetectionReport, _plain, aggregate_verdict


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 (2 is reserved for --expect)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class Output:
    data: dict
    header: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)
    text: list[str] = field(default_factory=list)
    verdict: str | None = None


# ---------------------------------------------------------------- parsing


def _floats(s: str) -> list[float]:
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {s!r}") from exc


def _vectors(s: str) -> list[list[float]]:
    return [_floats(part) for part in s.split(";") if part.strip()]


def threads() -> int:
    raw = os.environ.get("TOMO_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"TOMO_THREADS must be a positive integer, got {raw!r}")


def pmap(fn: Callable, items) -> list:
    """Order-preserving map over at most TOMO_THREADS workers."""
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _cfg(args) -> sections.QuadratureConfig:
    return sections.QuadratureConfig(method=args.method or "auto", seed=args.seed)


def _body(args) -> Body:
    if not args.body:
        raise UsageError("--body is required")
    return load_body(args.body)


def _xi(args, body: Body) -> np.ndarray:
    if args.xi is None:
        return np.eye(body.dim)[-1]
    v = np.asarray(_floats(args.xi))
    if v.size != body.dim:
        raise UsageError(f"--xi has {v.size} components, body has dimension {body.dim}")
    return normalize(v)


def _directions(args, body: Body) -> np.ndarray:
    """``--xi`` (``;``-separated) or e_1, the diagonal and one seeded random direction."""
    if args.xi:
        vs = [np.asarray(v) for v in _vectors(args.xi)]
        if any(v.size != body.dim for v in vs):
            raise UsageError("every --xi direction must match the body dimension")
        return np.array([normalize(v) for v in vs])
    n = body.dim
    rng = np.random.default_rng(args.seed)
    return np.array([np.eye(n)[0], normalize(np.ones(n)), normalize(rng.normal(size=n))])


def _dir_grid(body: Body, g: int | None):
    if body.dim == 2:
        return circle_grid(2 * g if g else 720)
    if body.dim == 3:
        return sphere_grid(g, 2 * g) if g else sphere_grid(48, 96)
    raise UsageError("direction grids exist for n = 2, 3 only")


def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    if isinstance(x, (list, tuple, np.ndarray)):
        return ";".join(_num(v) for v in x)
    return str(x)


def _report_output(rep: DetectionReport) -> Output:
    d = rep.to_dict()
    header = list(d["items"][0].keys()) if d["items"] else []
    rows = [[it.get(k) for k in header] for it in d["items"]]
    text = [f"verdict: {rep.verdict}", f"residual: {_num(rep.residual)}"]
    text += ["  " + "  ".join(f"{k}={_num(v)}" for k, v in it.items()) for it in d["items"]]
    return Output(d, header, rows, text, rep.verdict)


# --------------------------------------------------------------- commands


def cmd_section(args) -> Output:
    body = _body(args)
    xi = _xi(args, body)
    cfg = _cfg(args)
    if args.grid:
        prof = sections.section_profile(body, xi, args.grid, cfg)
        ts, vals, errs = prof.offsets, prof.values, prof.err
    else:
        ts = np.asarray(_floats(args.t) if args.t else [0.0])
        vals, errs = sections.section_values(body, xi, ts, cfg)
    header = [f"xi_{i + 1}" for i in range(body.dim)] + ["t", "A", "err"]
    rows = [[*xi.tolist(), float(t), float(v), float(e)] for t, v, e in zip(ts, vals, errs)]
    data = {"xi": xi.tolist(), "t": list(map(float, ts)), "A": list(map(float, vals)),
            "err": list(map(float, errs))}
    return Output(data, header, rows, [_num(v) for v in vals])


def cmd_cutoff(args) -> Output:
    body = _body(args)
    xi = _xi(args, body)
    cfg = _cfg(args)
    ts = _floats(args.t) if args.t else [0.0]
    rows = [[t, sections.cutoff_volume(body, xi, t, "-", cfg), sections.cutoff_volume(body, xi, t, "+", cfg)]
            for t in ts]
    data = {"xi": xi.tolist(), "rows": [dict(zip(("t", "V_minus", "V_plus"), r)) for r in rows]}
    text = [f"t={_num(r[0])}  V-={_num(r[1])}  V+={_num(r[2])}" for r in rows]
    return Output(data, ["t", "V_minus", "V_plus"], rows, text)


def _lambdas(args, width: float, default: tuple[float, float]) -> np.ndarray:
    lo = args.lambda_min if args.lambda_min is not None else default[0] / width
    hi = args.lambda_max if args.lambda_max is not None else default[1] / width
    return np.geomspace(lo, hi, args.grid or 64)


def cmd_fourier_slice(args) -> Output:
    body = _body(args)
    xi = _xi(args, body)
    cfg = _cfg(args)
    if args.lam:
        lams = np.asarray(_floats(args.lam))
    else:
        bm, bp = support_interval(body, xi)
        lams = _lambdas(args, bp - bm, (1.0, 100.0))
    vals = pmap(lambda lam: sections.fourier_slice(body, xi, lam, cfg), lams)
    rows = [[float(l), v.real, v.imag] for l, v in zip(lams, vals)]
    data = {"xi": xi.tolist(), "rows": [dict(zip(("lambda", "re", "im"), r)) for r in rows]}
    text = [f"lambda={_num(r[0])}  re={_num(r[1])}  im={_num(r[2])}" for r in rows]
    return Output(data, ["lambda", "re", "im"], rows, text)


def cmd_invert(args) -> Output:
    body = _body(args)
    if body.dim != 3:
        raise UsageError("invert requires a body in R^3")
    pts = _vectors(args.x) if args.x else [body.reference_point.tolist()]
    grid = sphere_grid(args.grid, 2 * args.grid) if args.grid else None
    sampler = sections.BodySampler(body, _cfg(args))
    res = pmap(lambda p: sections.invert_radon_3d(sampler, p, grid), pts)
    rows = [[*p, r.value, r.near_boundary] for p, r in zip(pts, res)]
    header = ["x_1", "x_2", "x_3", "value", "near_boundary"]
    data = {"rows": [dict(zip(header, r)) for r in rows]}
    text = [f"x={_num(p)}  value={_num(r.value)}" + ("  (near boundary)" if r.near_boundary else "")
            for p, r in zip(pts, res)]
    return Output(data, header, rows, text)


def cmd_polyfit(args) -> Output:
    body = _body(args)
    rep = polyalg.test_polynomial_integrability(
        body, _directions(args, body), max_degree=args.max_degree or 20, tol=args.tol or polyalg.DEFAULT_TOL,
        margin=polyalg.DEFAULT_MARGIN if args.margin is None else args.margin, grid_size=args.grid or 64,
        cfg=_cfg(args))
    return _report_output(rep)


def cmd_power_test(args) -> Output:
    body = _body(args)
    rep = polyalg.test_power_polynomiality(
        body, args.m, _directions(args, body), max_degree=args.max_degree or 20,
        tol=args.tol or polyalg.DEFAULT_TOL,
        margin=polyalg.DEFAULT_MARGIN if args.margin is None else args.margin, grid_size=args.grid or 64,
        cfg=_cfg(args))
    return _report_output(rep)


def cmd_hilbert(args) -> Output:
    body = _body(args)
    if args.t:
        xi = _xi(args, body)
        prof = sections.section_profile(body, xi, args.grid or 96, _cfg(args))
        ts = np.asarray(_floats(args.t))
        vals = polyalg.hilbert_transform_many(prof, ts)
        rows = [[float(t), float(v)] for t, v in zip(ts, vals)]
        return Output({"xi": xi.tolist(), "rows": [{"t": r[0], "H": r[1]} for r in rows]}, ["t", "H"], rows,
                      [f"t={_num(r[0])}  H={_num(r[1])}" for r in rows])
    win = _floats(args.window)[0] if args.window else 0.9
    rep = polyalg.test_hilbert_polynomiality(
        body, _directions(args, body), max_degree=args.max_degree or 12, tol=args.tol or polyalg.DEFAULT_TOL,
        window=win, grid_size=args.grid or 96)
    return _report_output(rep)


def cmd_derivatives(args) -> Output:
    body = _body(args)
    xi = _xi(args, body)
    prof = sections.section_profile(body, xi, args.grid or 64, _cfg(args))
    kmax = args.k if args.k is not None else 4
    vals = [polyalg.derivative_at_zero(prof, k) for k in range(kmax + 1)]
    rows = [[k, v] for k, v in enumerate(vals)]
    return Output({"xi": xi.tolist(), "derivatives": vals}, ["k", "value"], rows,
                  [f"k={k}  {_num(v)}" for k, v in rows])


def _equation_from_args(args) -> tuple[polyalg.AlgebraicEquation, dict]:
    if args.equation:
        try:
            with open(args.equation) as fh:
                spec = json.load(fh)
            coefs = spec["coefficients"]
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read equation file: {exc}") from exc
        except (KeyError, TypeError) as exc:
            raise BodySpecError("field 'coefficients': missing or malformed") from exc
        return polyalg.AlgebraicEquation(coefs), {"source": "equation"}
    body = _body(args)
    xi = _xi(args, body)
    prof = sections.section_profile(body, xi, args.grid or 64, _cfg(args), margin=polyalg.DEFAULT_MARGIN)
    fit = polyalg.fit_polynomial(prof.offsets, prof.values, args.max_degree or 20, args.tol or polyalg.DEFAULT_TOL)
    if fit.verdict != "polynomial":
        raise BodyError(f"section profile is {fit.verdict}; no algebraic relation w = p(t) to test")
    eq = polyalg.AlgebraicEquation([-fit.coefficients, [1.0]])
    return eq, {"source": "profile", "xi": xi.tolist(), "degree": fit.best_degree}


def cmd_singularities(args) -> Output:
    eq, meta = _equation_from_args(args)
    v = polyalg.has_real_singularities(eq)
    data = {**meta, **v.to_dict()}
    text = [f"verdict: {v.kind}"]
    if v.roots:
        text.append("roots: " + _num(v.roots))
    text.append("discriminant: " + _num(list(v.discriminant.coef)))
    rows = [[r] for r in v.roots]
    return Output(data, ["root"], rows, text, v.kind)


def cmd_moments(args) -> Output:
    body = _body(args)
    kmax = args.k if args.k is not None else 4
    grid = _dir_grid(body, args.grid)
    tables = moments.moment_tables(body, kmax, grid, _cfg(args))
    header = [f"xi_{i + 1}" for i in range(body.dim)] + ["k", "value"]
    rows = [row for tab in tables for row in tab.rows()]
    data = {"k_max": kmax, "grid": len(grid), "rows": [dict(zip(header, r)) for r in rows]}
    text = [f"k={tab.k}  min={_num(tab.values.min())}  max={_num(tab.values.max())}" for tab in tables]
    return Output(data, header, rows, text)


def cmd_range_check(args) -> Output:
    body = _body(args)
    kmax = args.k if args.k is not None else 6
    tol = args.tol or moments.DEFAULT_RANGE_TOL
    tables = moments.moment_tables(body, kmax, _dir_grid(body, args.grid), _cfg(args))
    reps = [moments.fit_homogeneous(t, tol) for t in tables]
    items = [{"k": r.k, "relative_residual": r.relative_residual, "verdict": r.verdict} for r in reps]
    rep = DetectionReport("range-check", aggregate_verdict([i["verdict"] for i in items]),
                          max(i["relative_residual"] for i in items), items, {"k_max": kmax, "tol": tol})
    return _report_output(rep)


def cmd_tangent_system(args) -> Output:
    body = _body(args)
    xi = _xi(args, body)
    h, hc = float(support(body, xi)), float(support(body, -xi))
    kmax = max(args.k if args.k is not None else 6, 5)
    p0 = [h**k + (-1) ** k * hc**k for k in range(kmax + 1)]
    S0, T0 = moments.build_S_order0(h, hc), moments.build_T_order0(h, hc)
    S1, T1 = moments.build_S_order1(h, hc), moments.build_T_order1(h, hc)
    dev0 = max(abs(S0 @ p0[k:k + 2] - np.array(p0[k + 1:k + 3])).max() for k in range(kmax - 1))
    p1 = moments.order1_moments(h, hc, 1.0, 0.5, 1.0, 0.5, kmax)
    dev1 = max(abs(S1 @ p1[k:k + 4] - p1[k + 1:k + 5]).max() for k in range(kmax - 3))
    data = {
        "xi": xi.tolist(), "h": h, "h_check": hc,
        "S0": S0.tolist(), "T0": T0.tolist(), "det_S0": float(np.linalg.det(S0)),
        "S1": S1.tolist(), "T1": T1.tolist(), "det_S1": float(np.linalg.det(S1)),
        "p_order0": p0, "deviation_order0": float(dev0), "deviation_order1": float(dev1),
    }
    text = [f"h={_num(h)}  h_check={_num(hc)}", f"det S0={_num(data['det_S0'])}  det S1={_num(data['det_S1'])}",
            f"recurrence deviation: order0={_num(dev0)}  order1={_num(dev1)}"]
    rows = [[k, v] for k, v in enumerate(p0)]
    return Output(data, ["k", "p"], rows, text)


def cmd_recover_product(args) -> Output:
    body = _body(args)
    grid = _dir_grid(body, args.grid)
    tm = moments.tangent_measure(body, grid)
    tabs = [moments.tangent_moments(tm, k) for k in range(4)]
    rec = moments.recover_support_product(tabs)
    true = tm.h * tm.h_check
    ok = ~rec.degenerate
    err = float(np.abs(rec.values[ok] - true[ok]).max()) if ok.any() else float("nan")
    header = [f"xi_{i + 1}" for i in range(body.dim)] + ["estimate", "h_h_check", "degenerate"]
    rows = [[*x.tolist(), float(e), float(t), bool(d)] for x, e, t, d in zip(grid.points, rec.values, true,
                                                                             rec.degenerate)]
    data = {"grid": len(grid), "max_error": err, "degenerate": int(rec.degenerate.sum()),
            "series_deviation": moments.geometric_series_check(tabs, tm.h, tm.h_check)}
    text = [f"max error: {_num(err)}", f"degenerate directions: {data['degenerate']}"]
    return Output(data, header, rows, text)


def cmd_detect_ellipsoid(args) -> Output:
    body = _body(args)
    trans = [np.asarray(v) for v in _vectors(args.translates)] if args.translates else None
    if trans and any(a.size != body.dim for a in trans):
        raise UsageError("every translate must match the body dimension")
    rep = moments.detect_ellipsoid(body, _dir_grid(body, args.grid), args.tol or moments.DEFAULT_DETECT_TOL, trans)
    return _report_output(rep)


def cmd_boundary_exponent(args) -> Output:
    body = _body(args)
    xi = _xi(args, body)
    win = _floats(args.window)[0] if args.window else 1e-2
    fit = asymptotics.boundary_exponent(body, xi, win, args.grid or 40, _cfg(args))
    rows = [[float(s), float(a)] for s, a in zip(fit.s, fit.values)]
    data = {"xi": xi.tolist(), "alpha": fit.alpha, "fit_error": fit.fit_error}
    return Output(data, ["s", "A"], rows, [f"alpha: {_num(fit.alpha)}", f"fit error: {_num(fit.fit_error)}"])


def cmd_stationary_phase(args) -> Output:
    body = _body(args)
    xi = _xi(args, body)
    bm, bp = support_interval(body, xi)
    lams = _lambdas(args, bp - bm, (10.0, 200.0))
    rep = asymptotics.finite_expansion_test(body, xi, lams, args.degree if args.degree is not None else 2,
                                            args.tol or polyalg.DEFAULT_TOL, _cfg(args))
    text = [f"verdict: {rep.verdict}", f"residual: {_num(rep.relative_residual)}",
            "residuals by degree: " + _num(rep.residuals_by_degree)]
    return Output({"xi": xi.tolist(), **rep.to_dict()}, ["lambda", "re", "im"], list(rep.rows()), text,
                  rep.verdict)


def cmd_harmonics(args) -> Output:
    body = _body(args)
    L = args.L if args.L is not None else 4
    grid = _dir_grid(body, args.grid)
    if args.t:
        ts = _floats(args.t)
        profs = harmonics.harmonic_profiles(body, L, ts, grid, _cfg(args))
        rows = [r for p in profs for r in p.rows()]
        data = {"L": L, "rows": [dict(zip(("k", "alpha", "t", "p"), r)) for r in rows]}
        return Output(data, ["k", "alpha", "t", "p"], rows,
                      [f"k={r[0]} alpha={r[1]} t={_num(r[2])}  {_num(r[3])}" for r in rows])
    win = _floats(args.window) if args.window else None
    if win is not None and len(win) != 2:
        raise UsageError("--window takes lo,hi for harmonics")
    rep = harmonics.test_coefficient_polynomiality(body, L, win, args.tol or 1e-6, grid=grid, cfg=_cfg(args))
    return _report_output(rep)


COMMANDS: dict[str, tuple[Callable[[Any], Output], str]] = {
    "section": (cmd_section, "section function A(xi, t) at offsets (--t) or on a profile (--grid)"),
    "cutoff": (cmd_cutoff, "cutoff volumes V-(xi, t) and V+(xi, t)"),
    "fourier-slice": (cmd_fourier_slice, "Fourier transform of the indicator along lambda*xi"),
    "invert": (cmd_invert, "back-projection inversion at points --x (n = 3)"),
    "polyfit": (cmd_polyfit, "polynomiality of t -> A(xi, t) per direction"),
    "power-test": (cmd_power_test, "polynomiality of A^m per direction"),
    "hilbert": (cmd_hilbert, "Hilbert transform in t (--t) or its polynomiality test"),
    "derivatives": (cmd_derivatives, "t-derivatives of A at t = 0 up to --k"),
    "singularities": (cmd_singularities, "real singularities of an algebraic relation Psi(t, w) = 0"),
    "moments": (cmd_moments, "moment tables M_k on a direction grid"),
    "range-check": (cmd_range_check, "homogeneous-polynomial range conditions for M_0..M_k"),
    "tangent-system": (cmd_tangent_system, "order-0 and order-1 tangent-measure matrices at --xi"),
    "recover-product": (cmd_recover_product, "recover h(xi)h(-xi) from tangent-measure moments"),
    "detect-ellipsoid": (cmd_detect_ellipsoid, "translated support-product ellipsoid detector"),
    "boundary-exponent": (cmd_boundary_exponent, "vanishing exponent of A at the upper tangency"),
    "stationary-phase": (cmd_stationary_phase, "finite oscillatory expansion test"),
    "harmonics": (cmd_harmonics, "harmonic coefficients (--t) or their polynomiality test"),
}


def build_parser() -> Parser:
    common = Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--body", help="JSON body spec (ellipsoid, polytope or lpball)")
    g.add_argument("--xi", help="direction a,b[,c]; several separated by ';' where accepted")
    g.add_argument("--t", help="offset or comma-separated offsets")
    g.add_argument("--grid", type=int, help="grid size (profile points, direction grid, lambda count)")
    g.add_argument("--tol", type=float, help="verdict tolerance")
    g.add_argument("--seed", type=int, default=0, help="seed for random directions and Monte-Carlo")
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("--format", choices=("text", "csv", "json"), default="text")
    g.add_argument("--expect", help="exit 2 unless the verdict equals this")
    g.add_argument("--method", choices=sections.METHODS, help="section evaluation method")
    g.add_argument("--max-degree", type=int, dest="max_degree")
    g.add_argument("--margin", type=float, help="profile margin as a fraction of the width")
    g.add_argument("--window", help="window fraction, or lo,hi for harmonics")
    g.add_argument("--translates", help="translates a;b;c for detect-ellipsoid")
    g.add_argument("--lambda", dest="lam", help="comma-separated lambda values")
    g.add_argument("--lambda-min", type=float, dest="lambda_min")
    g.add_argument("--lambda-max", type=float, dest="lambda_max")
    g.add_argument("--degree", type=int, help="expansion degree for stationary-phase")
    g.add_argument("--L", type=int, help="maximum harmonic degree")
    g.add_argument("--k", type=int, help="maximum moment or derivative order")
    g.add_argument("--m", type=int, default=2, help="power for power-test")
    g.add_argument("--x", help="points x;y;... for invert")
    g.add_argument("--equation", help="JSON file {\"coefficients\": [psi_0, ..., psi_N]} for singularities")

    parser = Parser(prog="tomo", description="Section functions of convex bodies and their characterizations.",
                    epilog="TOMO_THREADS caps the number of worker threads (default 1).")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=Parser)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext, description=helptext)
    return parser


def render(out: Output, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_plain(out.data), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(out.header)
        for r in out.rows:
            w.writerow([_num(v) for v in r])
        return buf.getvalue()
    return "\n".join(out.text) + "\n"


def _norm_verdict(v: str) -> str:
    return v.strip().lower().replace(" ", "-")


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    fn = COMMANDS[args.command][0]
    try:
        threads()
        out = fn(args)
    except (UsageError, BodySpecError, BodyError, ValueError, ArithmeticError,
            sections.QuadratureError, OSError) as exc:
        print(f"tomo {args.command}: error: {exc}", file=sys.stderr)
        return 1
    text = render(out, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.expect is not None:
        if out.verdict is None:
            print(f"tomo {args.command}: error: --expect given but the command has no verdict", file=sys.stderr)
            return 1
        if _norm_verdict(out.verdict) != _norm_verdict(args.expect):
            print(f"expected verdict {args.expect!r}, got {out.verdict!r}", file=sys.stderr)
            return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
