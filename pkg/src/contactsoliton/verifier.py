"""Residual checks of the transversal soliton equation.

Two routes are kept apart on purpose: frame-side residuals built from the
connection tables and closed-form partials, and a coordinate-chart route that
differentiates the metric numerically.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .frame_geometry import (
    FrameConnection,
    RicciMatrix,
    StructureFunctions,
    connection_from_structure,
)
from .model_spaces import ChartMetric, ChartPoint, SasakianModel
from .soliton_solver import (
    PotentialField,
    SolitonParams,
    delta_coefficients,
    evaluate_potential,
    sasakian_params,
)

FRAME_LABELS = ("e1", "e2", "xi")
COMPONENTS = ((2, 2), (0, 0), (1, 1), (2, 0), (2, 1), (0, 1))
SYSTEM_LABELS = (
    "e1(f2)+e2(f1)",
    "e1(f1)-delta1",
    "e2(f2)-delta2",
    "xi(f1)+delta3*f2",
    "xi(f2)+delta4*f1",
)

ANALYTIC_TOL = 1e-10
AXIS_TOL = 1e-9
FD_TOL = 1e-6
CHART_TOL = 1e-5


class FDInstabilityWarning(RuntimeWarning):
    """Two finite-difference estimates disagree by more than the tolerance."""


@dataclass
class ResidualReport:
    name: str
    residuals: dict[str, float]
    tolerance: float
    points_checked: int = 1
    values: dict[str, float] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max": self.max_residual,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "points": self.points_checked,
            "residuals": dict(self.residuals),
        }


class Scheme(str, enum.Enum):
    CENTRAL_2 = "central2"
    RICHARDSON_4 = "richardson4"


@dataclass(frozen=True)
class FDConfig:
    step: float = 1e-5
    scheme: Scheme = Scheme.CENTRAL_2
    tolerance: float = FD_TOL

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("finite-difference step must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


def _label(i: int, j: int) -> str:
    return f"{FRAME_LABELS[i]},{FRAME_LABELS[j]}"


# ---------------------------------------------------------------- frame side


def frame_killing_form(conn: FrameConnection, f, df) -> np.ndarray:
    """``g(nabla_X v, Y) + g(nabla_Y v, X)`` on the frame for ``v = f1 e1 + f2 e2``.

    ``df[i, k]`` is ``e_i(f_k)`` for ``k`` in (1, 2).
    """
    coeff = np.array([f[0], f[1], 0.0])
    ddf = np.zeros((3, 3))
    ddf[:, :2] = np.asarray(df, dtype=float)
    # g(nabla_{e_i} v, e_k) = e_i(f_k) + sum_j f_j gamma[i, j, k]
    nv = ddf + np.einsum("j,ijk->ik", coeff, conn.gamma)
    return nv + nv.T


def soliton_frame_residual(
    sf: StructureFunctions,
    ric: RicciMatrix,
    f,
    df,
    lam: float,
    tol: float = ANALYTIC_TOL,
) -> ResidualReport:
    conn = connection_from_structure(sf)
    M = 0.5 * frame_killing_form(conn, f, df) + ric.ric - lam * np.eye(3)
    values = {_label(i, j): float(M[i, j]) for i, j in COMPONENTS}
    return ResidualReport(
        name="soliton_frame",
        residuals={k: abs(v) for k, v in values.items()},
        values=values,
        tolerance=tol,
    )


def system_residuals(params: SolitonParams, f, df) -> np.ndarray:
    """The five first-order equations, signed, with ``df[i, k] = e_i(f_k)``."""
    df = np.asarray(df, dtype=float)
    return np.array([
        df[0, 1] + df[1, 0],
        df[0, 0] - params.delta1,
        df[1, 1] - params.delta2,
        df[2, 0] + params.delta3 * f[1],
        df[2, 1] + params.delta4 * f[0],
    ])


def _params_for(pf: PotentialField) -> SolitonParams:
    if pf.c1 is not None:
        return sasakian_params(pf.c1)
    return delta_coefficients(pf.mu, pf.beta)


def _resolve_params(pf: PotentialField, params) -> SolitonParams:
    expected = _params_for(pf)
    if isinstance(params, SasakianModel):
        if pf.c1 is None or abs(pf.c1 - params.c1) > 1e-12:
            raise ValueError("Sasakian model does not match the potential field")
        return expected
    if not np.allclose(params.deltas, expected.deltas, rtol=0, atol=1e-12):
        raise ValueError("soliton parameters do not match the potential field")
    return params


def _partials(pf: PotentialField, u1: float, u2: float, t: float):
    fv = pf.evaluate(u1, u2, t)
    df = np.vstack([fv.du1, fv.du2, fv.dt])
    return fv, df


def origin_residual(pf: PotentialField, params, tol: float = ANALYTIC_TOL) -> ResidualReport:
    params = _resolve_params(pf, params)
    fv, df = _partials(pf, 0.0, 0.0, 0.0)
    r = system_residuals(params, fv.f, df)
    return ResidualReport(
        name="origin",
        residuals={k: float(abs(x)) for k, x in zip(SYSTEM_LABELS, r)},
        values={k: float(x) for k, x in zip(SYSTEM_LABELS, r)},
        tolerance=tol,
    )


def axis_residual(pf: PotentialField, params, t_grid, tol: float = AXIS_TOL) -> ResidualReport:
    params = _resolve_params(pf, params)
    t = np.asarray(t_grid, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("t grid must be finite")
    fv = pf.evaluate(0.0, 0.0, t)
    delta = params.delta
    res = {
        SYSTEM_LABELS[3]: fv.dt[0] + params.delta3 * fv.f[1],
        SYSTEM_LABELS[4]: fv.dt[1] + params.delta4 * fv.f[0],
        "f1_tt-delta*f1": fv.dtt[0] - delta * fv.f[0],
        "f2_tt-delta*f2": fv.dtt[1] - delta * fv.f[1],
    }
    return ResidualReport(
        name="axis",
        residuals={k: float(np.max(np.abs(v), initial=0.0)) for k, v in res.items()},
        tolerance=tol,
        points_checked=int(t.size),
    )


# ---------------------------------------------------------------- chart side


def _central(fn, x: np.ndarray, h: float) -> np.ndarray:
    """Stack of central differences; ``out[c]`` is d fn / d x^c."""
    out = []
    for c in range(3):
        dx = np.zeros(3)
        dx[c] = h
        out.append((np.asarray(fn(x + dx)) - np.asarray(fn(x - dx))) / (2 * h))
    return np.array(out)


def derivative(fn, x, cfg: FDConfig) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d_h = _central(fn, x, cfg.step)
    if cfg.scheme is Scheme.CENTRAL_2:
        return d_h
    d_half = _central(fn, x, cfg.step / 2)
    return (4 * d_half - d_h) / 3


def _richardson_gap(fn, x, cfg: FDConfig) -> float:
    x = np.asarray(x, dtype=float)
    d_h = _central(fn, x, cfg.step)
    d_half = _central(fn, x, cfg.step / 2)
    return float(np.max(np.abs(d_h - (4 * d_half - d_h) / 3)))


def lie_derivative_fd(chart: ChartMetric, v, p, cfg: FDConfig = FDConfig(), check: bool = True) -> np.ndarray:
    """Coordinate components of the Lie derivative of the chart metric along ``v``.

    ``v`` maps coordinates to coordinate components.  With ``check`` the
    CENTRAL_2 and RICHARDSON_4 estimates are compared and an
    :class:`FDInstabilityWarning` is raised when they disagree.
    """
    x = p.as_array() if isinstance(p, ChartPoint) else np.asarray(p, dtype=float)
    g = chart.metric(x)
    dg = derivative(chart.metric, x, cfg)  # dg[c, a, b]
    dv = derivative(v, x, cfg)  # dv[a, c] = d_a v^c
    L = np.einsum("c,cab->ab", np.asarray(v(x)), dg) + dv @ g + (dv @ g).T
    if check:
        gap = max(_richardson_gap(chart.metric, x, cfg), _richardson_gap(v, x, cfg))
        if gap > cfg.tolerance:
            warnings.warn(
                f"finite-difference estimates disagree by {gap:.3g} (step {cfg.step:g})",
                FDInstabilityWarning,
                stacklevel=2,
            )
    return 0.5 * (L + L.T)


def christoffel_fd(chart: ChartMetric, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """``Gamma[a, b, c]`` = Gamma^a_{bc} from differenced metric components."""
    x = np.asarray(x, dtype=float)
    ginv = np.linalg.inv(chart.metric(x))
    dg = derivative(chart.metric, x, cfg)
    # lowered: Gamma_{d b c} = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
    low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    return np.einsum("ad,dbc->abc", ginv, low)


def _outer(cfg: FDConfig) -> FDConfig:
    # second derivatives are nested differences; a larger outer step keeps
    # the roundoff of the inner quotient from being amplified twice
    return FDConfig(step=math.sqrt(cfg.step) * 0.1, scheme=cfg.scheme, tolerance=cfg.tolerance)


def ricci_fd(chart: ChartMetric, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Coordinate Ricci tensor from numerically differentiated Christoffel symbols."""
    x = np.asarray(x, dtype=float)
    G = christoffel_fd(chart, x, cfg)
    dG = derivative(lambda y: christoffel_fd(chart, y, cfg), x, _outer(cfg))  # dG[e, a, b, c]
    # R_bd = d_a G^a_bd - d_d G^a_ba + G^a_ae G^e_bd - G^a_de G^e_ba
    ric = (
        np.einsum("aabd->bd", dG)
        - np.einsum("daba->bd", dG)
        + np.einsum("aae,ebd->bd", G, G)
        - np.einsum("ade,eba->bd", G, G)
    )
    return 0.5 * (ric + ric.T)


def to_frame(chart: ChartMetric, x, tensor: np.ndarray) -> np.ndarray:
    E = chart.frame(x)
    return E @ tensor @ E.T


def frame_ricci_fd(chart: ChartMetric, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    return to_frame(chart, x, ricci_fd(chart, x, cfg))


def frame_connection_fd(chart: ChartMetric, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """``gamma[i, j, k] = g(nabla_{e_i} e_j, e_k)`` from the chart."""
    x = np.asarray(x, dtype=float)
    E = chart.frame(x)
    g = chart.metric(x)
    G = christoffel_fd(chart, x, cfg)
    dE = derivative(chart.frame, x, cfg)  # dE[a, j, c] = d_a e_j^c
    # nabla_{e_i} e_j = e_i^a (d_a e_j^c + Gamma^c_ab e_j^b) d_c
    nab = np.einsum("ia,ajc->ijc", E, dE) + np.einsum("ia,cab,jb->ijc", E, G, E)
    return np.einsum("ijc,cd,kd->ijk", nab, g, E)


class Coordinates(str, enum.Enum):
    CHART = "chart"
    ADAPTED = "adapted"


def field_in_chart(chart: ChartMetric, pf: PotentialField, coordinates: Coordinates = Coordinates.ADAPTED, base=(0.0, 0.0, 0.0)):
    """Coordinate vector field ``x -> f1 e1 + f2 e2`` on the chart.

    ``CHART`` feeds the chart coordinates straight into ``(f1, f2)``.
    ``ADAPTED`` uses the linear coordinates ``s`` with ``x = base + E(base)^T s``,
    whose coordinate vectors equal the frame at ``base``; they agree with
    normal coordinates at ``base`` to first order.
    """
    base = np.asarray(base, dtype=float)
    L = chart.frame(base).T

    def v(x):
        x = np.asarray(x, dtype=float)
        if coordinates is Coordinates.CHART:
            s = x
        else:
            s = np.linalg.solve(L, x - base)
        f1, f2 = pf(*s)
        E = chart.frame(x)
        return f1 * E[0] + f2 * E[1]

    return v


def chart_soliton_matrix(chart: ChartMetric, v, lam: float, p, cfg: FDConfig = FDConfig(), check: bool = True) -> np.ndarray:
    """Frame components of 1/2 L_v g + Ric - lam g evaluated on the chart."""
    x = p.as_array() if isinstance(p, ChartPoint) else np.asarray(p, dtype=float)
    M = 0.5 * lie_derivative_fd(chart, v, x, cfg, check=check) + ricci_fd(chart, x, cfg) - lam * chart.metric(x)
    return to_frame(chart, x, M)


def chart_soliton_residual(
    chart: ChartMetric,
    pf: PotentialField | None,
    lam: float,
    p=ChartPoint(0.0, 0.0, 0.0),
    cfg: FDConfig = FDConfig(),
    coordinates: Coordinates = Coordinates.ADAPTED,
    tol: float = CHART_TOL,
) -> ResidualReport:
    if pf is None:
        v = lambda x: np.zeros(3)  # noqa: E731
    else:
        v = field_in_chart(chart, pf, coordinates)
    flags = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", FDInstabilityWarning)
        M = chart_soliton_matrix(chart, v, lam, p, cfg)
    if any(issubclass(w.category, FDInstabilityWarning) for w in caught):
        flags.append("fd_unstable")
    values = {_label(i, j): float(M[i, j]) for i, j in COMPONENTS}
    return ResidualReport(
        name=f"chart[{coordinates.value}]",
        residuals={k: abs(x) for k, x in values.items()},
        values=values,
        tolerance=tol,
        flags=flags,
    )


def chart_residual_field(
    chart: ChartMetric,
    pf: PotentialField,
    lam: float,
    points,
    cfg: FDConfig = FDConfig(),
    coordinates: Coordinates = Coordinates.ADAPTED,
) -> list[tuple[tuple[float, float, float], float]]:
    """Max frame residual at each point; reported as data, not judged."""
    v = field_in_chart(chart, pf, coordinates)
    out = []
    for p in points:
        x = np.asarray(p, dtype=float)
        M = chart_soliton_matrix(chart, v, lam, x, cfg, check=False)
        out.append((tuple(float(c) for c in x), float(np.max(np.abs(M)))))
    return out
