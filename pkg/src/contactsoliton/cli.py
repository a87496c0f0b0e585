"""Command-line front end.

Exit codes: 0 pass or informational, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import frame_geometry as fg
from .model_spaces import (
    NonSasakianModel,
    SasakianModel,
    ChartPoint,
    classify_group,
    heisenberg_chart,
    nonsasakian_model,
    sasakian_model,
)
from .soliton_solver import (
    delta_coefficients,
    sasakian_params,
    solve_potential,
    solve_sasakian_potential,
)
from .verifier import (
    ANALYTIC_TOL,
    AXIS_TOL,
    CHART_TOL,
    Coordinates,
    FDConfig,
    ResidualReport,
    chart_residual_field,
    chart_soliton_residual,
    frame_ricci_fd,
    origin_residual,
    axis_residual,
    soliton_frame_residual,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TABLE_MUS = (0.5, 1.0, 2.0)


class UsageError(Exception):
    pass


# ------------------------------------------------------------ serialization


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Canonical JSON: sorted keys, floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


# ------------------------------------------------------------ arguments


def _point(text: str) -> ChartPoint:
    try:
        return ChartPoint.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("grid must be at least 1")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not (math.isfinite(x) and x > 0):
        raise argparse.ArgumentTypeError("expected a positive number")
    return x


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mu", type=float, help="eigenvalue of h (non-Sasakian models)")
    common.add_argument("--beta", type=float, default=0.0, help="(alpha, beta) constant beta (default 0)")
    common.add_argument("--sasakian", action="store_true", help="use the Sasakian group model")
    common.add_argument("--c1", type=float, help="Sasakian structure constant")
    common.add_argument("--C", type=float, default=1.0, help="integration constant C (default 1)")
    common.add_argument("--D", type=float, default=0.0, help="integration constant D (default 0)")
    common.add_argument("--point", type=_point, help="evaluation point u1,u2,t")
    common.add_argument("--grid", type=_positive_int, default=41, help="grid size (default 41)")
    common.add_argument("--tol", type=_positive_float, help="pass tolerance (default tiered)")
    common.add_argument("--step", type=_positive_float, default=1e-5, help="finite-difference step (default 1e-5)")
    common.add_argument("--json", action="store_true", help="emit the JSON report")

    parser = _Parser(prog="contactsoliton", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("classify", parents=[common], help="soliton constants, case and Lie group")
    sub.add_parser("solve", parents=[common], help="closed-form potential field")
    sub.add_parser("verify", parents=[common], help="origin and Reeb-axis residuals")
    sub.add_parser("curvature", parents=[common], help="curvature of the model frame")
    sub.add_parser("table", parents=[common], help="the beta = 0 classification table")
    sub.add_parser("heisenberg", parents=[common], help="coordinate-chart residual on Nil")
    return parser


def _model(args):
    if args.sasakian or args.command == "heisenberg":
        c1 = 0.0 if args.command == "heisenberg" else args.c1
        if c1 is None:
            raise UsageError("--sasakian requires --c1")
        return SasakianModel(c1)
    if args.mu is None:
        raise UsageError("--mu is required (or use --sasakian --c1)")
    if not args.mu > 0:
        raise UsageError("--mu must be positive for non-Sasakian models")
    return NonSasakianModel(args.mu, args.beta)


# ------------------------------------------------------------ report pieces


def _soliton_block(model) -> dict:
    p = sasakian_params(model.c1) if isinstance(model, SasakianModel) else delta_coefficients(model.mu, model.beta)
    return {
        "lambda": p.lam,
        "deltas": list(p.deltas),
        "case": p.case.value,
        "type": p.type.value,
    }


def _params_block(model, args) -> dict:
    if isinstance(model, SasakianModel):
        return {"sasakian": True, "c1": model.c1, "C": args.C, "D": args.D}
    return {"sasakian": False, "mu": model.mu, "beta": model.beta, "alpha": model.alpha, "C": args.C, "D": args.D}


def _solve(model, C, D):
    if isinstance(model, SasakianModel):
        return solve_sasakian_potential(model.c1, C, D)
    return solve_potential(model.mu, model.beta, C, D)


def _field_block(pf) -> dict:
    return {
        "case": pf.case.value,
        "family": pf.family.value,
        "basis": pf.basis.value,
        "rate": pf.rate,
        "C": pf.C,
        "D": pf.D,
        "coefficients": {k: list(v) for k, v in pf.coefficient_table().items()},
    }


def _model_frame(model):
    if isinstance(model, SasakianModel):
        _, ric, _ = sasakian_model(model.c1)
        return model.structure(), ric
    return nonsasakian_model(model.mu, model.beta)


# ------------------------------------------------------------ commands


def cmd_classify(args, report):
    model = _model(args)
    report["params"] = _params_block(model, args)
    report["soliton"] = _soliton_block(model)
    report["group"] = classify_group(model).label()
    return True


def cmd_solve(args, report):
    model = _model(args)
    cmd_classify(args, report)
    pf = _solve(model, args.C, args.D)
    report["field"] = _field_block(pf)
    if args.point is not None:
        fv = pf.evaluate(args.point.u1, args.point.u2, args.point.t)
        report["field"]["value"] = {"point": list(args.point.as_array()), "f1": fv.f[0], "f2": fv.f[1]}
    return True


def cmd_verify(args, report):
    model = _model(args)
    cmd_classify(args, report)
    pf = _solve(model, args.C, args.D)
    report["field"] = _field_block(pf)
    params = sasakian_params(model.c1) if isinstance(model, SasakianModel) else delta_coefficients(model.mu, model.beta)
    grid = np.linspace(-2.0, 2.0, args.grid)

    sf, ric = _model_frame(model)
    fv = pf.evaluate(0.0, 0.0, 0.0)
    df = np.vstack([fv.du1, fv.du2, fv.dt])
    reports = [
        origin_residual(pf, params, tol=args.tol or ANALYTIC_TOL),
        axis_residual(pf, params, grid, tol=args.tol or AXIS_TOL),
        soliton_frame_residual(sf, ric, fv.f, df, params.lam, tol=args.tol or ANALYTIC_TOL),
    ]
    report["residuals"] = [r.to_dict() for r in reports]
    return all(r.passed for r in reports)


def cmd_curvature(args, report):
    model = _model(args)
    report["params"] = _params_block(model, args)
    sf, ric = _model_frame(model)
    conn = fg.connection_from_structure(sf)
    curv = fg.curvature_from_connection(conn)
    tol = args.tol or 1e-12
    defects = curv.symmetry_defects()
    ric_gap = float(np.max(np.abs(curv.ricci().ric - ric.ric)))
    ab = fg.alpha_beta_identify(curv, sf, tol=max(tol, 1e-12))
    report["curvature"] = {
        "sectional": {"e1,e2": curv.sectional(0, 1), "e1,xi": curv.sectional(0, 2), "e2,xi": curv.sectional(1, 2)},
        "ricci": [list(row) for row in curv.ricci().ric],
        "alpha_beta": list(ab) if ab is not None else None,
        "eta_parallel": fg.eta_parallel_residual(sf),
    }
    rep = ResidualReport(name="curvature_symmetries", residuals={**defects, "ricci_vs_model": ric_gap}, tolerance=tol)
    report["residuals"] = [rep.to_dict()]
    return rep.passed


def table_rows() -> list[dict]:
    rows = []
    for mu in TABLE_MUS:
        model = NonSasakianModel(mu, 0.0)
        p = delta_coefficients(mu, 0.0)
        sign = "zero" if p.case.value == "III" else ("positive" if p.delta > 0 else "negative")
        rows.append({
            "mu": mu,
            "delta": sign,
            "potential_type": p.case.value,
            "soliton": p.type.value,
            "group": classify_group(model).label(),
        })
    return rows


def cmd_table(args, report):
    report["table"] = table_rows()
    return True


def cmd_heisenberg(args, report):
    model = _model(args)
    cmd_classify(args, report)
    pf = solve_sasakian_potential(0.0, args.C, args.D)
    report["field"] = _field_block(pf)
    chart = heisenberg_chart()
    cfg = FDConfig(step=args.step)
    origin = ChartPoint(0.0, 0.0, 0.0)
    tol = args.tol or CHART_TOL

    ric = np.diag(frame_ricci_fd(chart, origin.as_array(), cfg))
    ricci_rep = ResidualReport(
        name="chart_ricci_origin",
        residuals={f"Ric({k},{k})": float(abs(a - b)) for k, a, b in zip(("e1", "e2", "xi"), ric, (-2.0, -2.0, 2.0))},
        tolerance=1e-4,
    )
    main = chart_soliton_residual(chart, pf, 2.0, origin, cfg, Coordinates.ADAPTED, tol=tol)
    literal = chart_soliton_residual(chart, pf, 2.0, origin, cfg, Coordinates.CHART, tol=tol)
    report["residuals"] = [ricci_rep.to_dict(), main.to_dict()]

    g = np.linspace(-1.0, 1.0, min(args.grid, 5) if args.grid > 1 else 1)
    pts = [(a, b, c) for a in g for b in g for c in g]
    data = {
        "literal_chart_origin": literal.to_dict(),
        "off_origin_field": [
            {"point": list(p), "max": m} for p, m in chart_residual_field(chart, pf, 2.0, pts, cfg)
        ],
    }
    if args.point is not None:
        at = chart_soliton_residual(chart, pf, 2.0, args.point, cfg, Coordinates.ADAPTED, tol=tol)
        data["at_point"] = {"point": list(args.point.as_array()), **at.to_dict()}
    report["data"] = data
    return ricci_rep.passed and main.passed


COMMANDS = {
    "classify": (cmd_classify, False),
    "solve": (cmd_solve, False),
    "verify": (cmd_verify, True),
    "curvature": (cmd_curvature, True),
    "table": (cmd_table, False),
    "heisenberg": (cmd_heisenberg, True),
}


# ------------------------------------------------------------ output


def _human(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    if "table" in report:
        head = ("mu", "delta", "potential_type", "soliton", "group")
        rows = [head] + [tuple(str(r[k]) for k in head) for r in report["table"]]
        widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
        for r in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    for key in ("params", "soliton"):
        if key in report:
            lines.append(f"{key}: " + ", ".join(f"{k}={v}" for k, v in report[key].items()))
    if "group" in report:
        lines.append(f"group: {report['group']}")
    if "field" in report:
        f = report["field"]
        lines.append(f"field: case={f['case']} family={f['family']} basis={f['basis']} rate={f['rate']}")
        for name, coef in f["coefficients"].items():
            lines.append(f"  {name} = {coef[0]:+.6g}*u1 {coef[1]:+.6g}*u2 {coef[2]:+.6g}")
        if "value" in f:
            lines.append(f"  f1={f['value']['f1']:.17g} f2={f['value']['f2']:.17g}")
    if "curvature" in report:
        c = report["curvature"]
        lines.append("sectional: " + ", ".join(f"K({k})={v:.12g}" for k, v in c["sectional"].items()))
        lines.append(f"alpha,beta: {c['alpha_beta']}  eta_parallel: {c['eta_parallel']:.3g}")
    for r in report.get("residuals", []):
        status = "PASS" if r["pass"] else "FAIL"
        lines.append(f"{status} {r['name']}: max={r['max']:.3e} tol={r['tolerance']:.1e}")
    if "data" in report:
        field = report["data"].get("off_origin_field", [])
        if field:
            worst = max(field, key=lambda d: d["max"])
            lines.append(f"off-origin residual (data): max={worst['max']:.3e} at {worst['point']}")
        lit = report["data"].get("literal_chart_origin")
        if lit:
            lines.append(f"literal chart coordinates at origin (data): max={lit['max']:.3e}")
    lines.append(f"pass: {report['pass']}")
    return "\n".join(lines)


def run(argv=None) -> tuple[dict | None, int]:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    func, judged = COMMANDS[args.command]
    report: dict = {"command": args.command}
    try:
        ok = func(args, report)
    except (UsageError, ValueError) as exc:
        print(f"contactsoliton: error: {exc}", file=sys.stderr)
        return None, EXIT_USAGE
    report["pass"] = bool(ok)
    report["wall_time_ms"] = int((time.perf_counter() - start) * 1000)
    out = dumps(report) if args.json else _human(report)
    sys.stdout.write(out + "\n")
    code = EXIT_OK if (ok or not judged) else EXIT_FAIL
    return report, code


def main(argv=None) -> int:
    try:
        _, code = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return code


if __name__ == "__main__":
    sys.exit(main())
