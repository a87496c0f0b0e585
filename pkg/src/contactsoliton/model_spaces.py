"""Model geometries: Sasakian unimodular groups, (alpha, beta) models, Heisenberg chart."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .frame_geometry import (
    ContactTensors,
    FrameConnection,
    RicciMatrix,
    StructureFunctions,
    connection_from_structure,
)

ZERO_TOL = 1e-12


@dataclass(frozen=True)
class SasakianModel:
    """Left-invariant Sasakian structure with [e1,e2]=2e3, [e2,e3]=c1 e1, [e3,e1]=c1 e2."""

    c1: float

    def __post_init__(self):
        if not math.isfinite(self.c1):
            raise ValueError("c1 must be finite")

    def structure(self) -> StructureFunctions:
        # the structure-function frame with mu = 0, b = c = 0 and a = c1 - 1
        return StructureFunctions(a=self.c1 - 1.0, b=0.0, c=0.0, mu=0.0)


@dataclass(frozen=True)
class NonSasakianModel:
    mu: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.beta)):
            raise ValueError("mu and beta must be finite")
        if self.mu <= 0:
            raise ValueError("mu must be positive for a non-Sasakian model (use SasakianModel for mu = 0)")

    @property
    def alpha(self) -> float:
        return 1.0 - self.mu**2

    def structure(self) -> StructureFunctions:
        return StructureFunctions(a=-self.beta / 2, b=0.0, c=0.0, mu=self.mu)


class Group(str, enum.Enum):
    SU2 = "SU2"
    SL2R = "SL2R"
    E2 = "E2"
    E11 = "E11"
    NIL = "NIL"
    UNIT_SPHERE = "UNIT_SPHERE"


@dataclass(frozen=True)
class GroupTag:
    """One group, or a candidate set when the model data does not pin it down.

    ``flags`` carries extra qualifiers (the unit sphere for c1 = 2).
    """

    candidates: tuple[Group, ...]
    flags: tuple[Group, ...] = ()

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("a group tag needs at least one candidate")

    @property
    def is_candidate_set(self) -> bool:
        return len(self.candidates) > 1

    @property
    def group(self) -> Group | None:
        return None if self.is_candidate_set else self.candidates[0]

    def label(self) -> str:
        if self.is_candidate_set:
            return "CANDIDATE_SET{" + ",".join(g.value for g in self.candidates) + "}"
        return "+".join(g.value for g in self.candidates + self.flags)


def sasakian_model(c1: float) -> tuple[FrameConnection, RicciMatrix, ContactTensors]:
    model = SasakianModel(c1)
    conn = connection_from_structure(model.structure())
    ric = RicciMatrix(np.diag([2 * c1 - 2, 2 * c1 - 2, 2.0]))
    return conn, ric, ContactTensors.from_mu(0.0)


def nonsasakian_model(mu: float, beta: float) -> tuple[StructureFunctions, RicciMatrix]:
    model = NonSasakianModel(mu, beta)
    # S = -beta I + beta h + (2 alpha + beta) eta (x) xi
    ric = np.diag([-beta + beta * mu, -beta - beta * mu, 2 * model.alpha])
    return model.structure(), RicciMatrix(ric)


@dataclass(frozen=True)
class ContactStructure:
    """Frame-component data ``(eta, xi, phi, g)`` plus the 2-form ``deta``.

    Components are taken in a fixed reference basis, so a D-homothetic
    deformation changes the numbers but not the basis.
    """

    eta: np.ndarray
    xi: np.ndarray
    phi: np.ndarray
    g: np.ndarray
    deta: np.ndarray

    @classmethod
    def standard(cls, mu: float = 0.0) -> ContactStructure:
        ct = ContactTensors.from_mu(mu)
        g = np.eye(3)
        # d eta(X, Y) = g(X, phi Y)
        return cls(eta=ct.eta, xi=ct.xi, phi=ct.phi, g=g, deta=g @ ct.phi)

    def defects(self) -> dict[str, float]:
        I = np.eye(3)
        return {
            "eta_xi": abs(float(self.eta @ self.xi) - 1.0),
            "eta_is_g_xi": float(np.max(np.abs(self.g @ self.xi - self.eta))),
            "deta_is_g_phi": float(np.max(np.abs(self.deta - self.g @ self.phi))),
            "phi_squared": float(np.max(np.abs(self.phi @ self.phi + I - np.outer(self.xi, self.eta)))),
            "deta_xi": float(np.max(np.abs(self.deta @ self.xi))),
        }


def d_homothetic(structure: ContactStructure, eps: float) -> ContactStructure:
    if not eps > 0:
        raise ValueError("deformation parameter must be positive")
    eta = structure.eta
    return ContactStructure(
        eta=eps * eta,
        xi=structure.xi / eps,
        phi=structure.phi.copy(),
        g=eps * structure.g + eps * (eps - 1.0) * np.outer(eta, eta),
        deta=eps * structure.deta,
    )


def classify_group(model: SasakianModel | NonSasakianModel) -> GroupTag:
    if isinstance(model, SasakianModel):
        c1 = model.c1
        if abs(c1) < ZERO_TOL:
            return GroupTag((Group.NIL,))
        if c1 > 0:
            flags = (Group.UNIT_SPHERE,) if abs(c1 - 2.0) < ZERO_TOL else ()
            return GroupTag((Group.SU2,), flags)
        return GroupTag((Group.SL2R,))

    if abs(model.beta) >= ZERO_TOL:
        return GroupTag((Group.SU2, Group.SL2R, Group.E2, Group.E11))
    if abs(model.mu - 1.0) < ZERO_TOL:
        return GroupTag((Group.E2,))
    return GroupTag((Group.SU2,) if model.mu < 1 else (Group.SL2R,))


@dataclass(frozen=True)
class ChartPoint:
    u1: float
    u2: float
    t: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2, self.t], dtype=float)

    @classmethod
    def parse(cls, text: str) -> ChartPoint:
        parts = text.split(",")
        if len(parts) != 3:
            raise ValueError(f"expected u1,u2,t but got {text!r}")
        vals = [float(p) for p in parts]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite coordinate in {text!r}")
        return cls(*vals)


def _coords(p) -> np.ndarray:
    if isinstance(p, ChartPoint):
        return p.as_array()
    return np.asarray(p, dtype=float)


@dataclass(frozen=True)
class ChartMetric:
    """A metric given in coordinates, together with an adapted orthonormal frame.

    ``frame(p)`` returns a 3x3 array whose rows are the coordinate components
    of ``e1, e2, xi``.
    """

    name: str
    metric_fn: object
    frame_fn: object
    eta_fn: object = field(default=None)

    def metric(self, p) -> np.ndarray:
        return self.metric_fn(_coords(p))

    def frame(self, p) -> np.ndarray:
        return self.frame_fn(_coords(p))

    def eta(self, p) -> np.ndarray:
        if self.eta_fn is None:
            raise AttributeError(f"chart {self.name!r} carries no contact form")
        return self.eta_fn(_coords(p))

    def frame_gram(self, p) -> np.ndarray:
        E = self.frame(p)
        return E @ self.metric(p) @ E.T


def _heis_eta(x):
    return np.array([-0.5 * x[1], 0.0, 0.5])


def _heis_metric(x):
    eta = _heis_eta(x)
    return np.outer(eta, eta) + 0.25 * np.diag([1.0, 1.0, 0.0])


def _heis_frame(x):
    # e2 = -2 d/du2 makes [e1, e2] = +2 xi
    return np.array([
        [2.0, 0.0, 2.0 * x[1]],
        [0.0, -2.0, 0.0],
        [0.0, 0.0, 2.0],
    ])


def heisenberg_chart() -> ChartMetric:
    return ChartMetric("heisenberg", _heis_metric, _heis_frame, _heis_eta)


def euclidean_chart() -> ChartMetric:
    return ChartMetric("euclidean", lambda x: np.eye(3), lambda x: np.eye(3))
