"""Soliton constants and closed-form transversal potential fields.

A potential field ``v = f1 e1 + f2 e2`` is stored as

    f_i(u1, u2, t) = A_i(u1, u2) * P(t) + B_i(u1, u2) * Q(t)

where ``A_i``, ``B_i`` are affine in ``(u1, u2)`` and ``(P, Q)`` is
``(exp(rt), exp(-rt))``, ``(cos rt, sin rt)`` or ``(1, t)`` depending on
the sign of ``delta``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .model_spaces import NonSasakianModel, SasakianModel

DELTA_ZERO = 1e-12


class Case(str, enum.Enum):
    CASE_I = "I"
    CASE_II = "II"
    CASE_III = "III"


class SolitonType(str, enum.Enum):
    SHRINKING = "shrinking"
    STEADY = "steady"
    EXPANDING = "expanding"


class Family(str, enum.Enum):
    NONSASAKIAN = "nonsasakian"
    SASAKIAN = "sasakian"
    SPHERE_SPECIAL = "sphere_special"
    FLAT_SPECIAL = "flat_special"


class Basis(str, enum.Enum):
    EXP = "exp"
    TRIG = "trig"
    LINEAR = "linear"


def soliton_type(lam: float) -> SolitonType:
    if lam > 0:
        return SolitonType.SHRINKING
    if lam < 0:
        return SolitonType.EXPANDING
    return SolitonType.STEADY


def _case_for(delta: float) -> Case:
    if abs(delta) < DELTA_ZERO:
        return Case.CASE_III
    return Case.CASE_I if delta > 0 else Case.CASE_II


@dataclass(frozen=True)
class SolitonParams:
    lam: float
    delta1: float
    delta2: float
    delta3: float
    delta4: float

    @property
    def delta(self) -> float:
        return self.delta3 * self.delta4

    @property
    def case(self) -> Case:
        return _case_for(self.delta)

    @property
    def type(self) -> SolitonType:
        return soliton_type(self.lam)

    @property
    def deltas(self) -> tuple[float, float, float, float, float]:
        return (self.delta1, self.delta2, self.delta3, self.delta4, self.delta)


def soliton_constant(model: SasakianModel | NonSasakianModel) -> float:
    if isinstance(model, SasakianModel):
        return 2.0
    return 2.0 - 2.0 * model.mu**2


def delta_coefficients(mu: float, beta: float) -> SolitonParams:
    if not mu > 0:
        raise ValueError("mu must be positive")
    base = 2.0 - 2.0 * mu**2
    return SolitonParams(
        lam=base,
        delta1=beta - beta * mu + base,
        delta2=beta + beta * mu + base,
        delta3=beta / 2 + 1 + mu,
        delta4=-beta / 2 + mu - 1,
    )


def sasakian_params(c1: float) -> SolitonParams:
    """Constants of the Sasakian first-order system written in the same shape.

    With ``delta1 = delta2 = 4 - 2 c1``, ``delta3 = 2 - c1`` and
    ``delta4 = c1 - 2`` the Sasakian system has exactly the non-Sasakian
    layout; these are also the mu -> 0 values with beta = 2 - 2 c1.
    """
    k = 4.0 - 2.0 * c1
    return SolitonParams(lam=2.0, delta1=k, delta2=k, delta3=2.0 - c1, delta4=c1 - 2.0)


@dataclass(frozen=True)
class Affine:
    """``cu1 * u1 + cu2 * u2 + const``."""

    cu1: float
    cu2: float
    const: float

    def __call__(self, u1, u2):
        return self.cu1 * u1 + self.cu2 * u2 + self.const

    def shifted(self, d: float) -> Affine:
        return replace(self, const=self.const + d)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.cu1, self.cu2, self.const)


@dataclass(frozen=True)
class FieldValues:
    f: np.ndarray  # (f1, f2)
    du1: np.ndarray
    du2: np.ndarray
    dt: np.ndarray
    dtt: np.ndarray


@dataclass(frozen=True)
class PotentialField:
    case: Case
    family: Family
    basis: Basis
    rate: float
    A1: Affine
    A2: Affine
    B1: Affine
    B2: Affine
    C: float
    D: float
    mu: float | None = None
    beta: float | None = None
    c1: float | None = None

    def _time(self, t):
        r = self.rate
        if self.basis is Basis.EXP:
            ep, em = np.exp(r * t), np.exp(-r * t)
            return (ep, em), (r * ep, -r * em), (r * r * ep, r * r * em)
        if self.basis is Basis.TRIG:
            c, s = np.cos(r * t), np.sin(r * t)
            return (c, s), (-r * s, r * c), (-r * r * c, -r * r * s)
        one = np.ones_like(np.asarray(t, dtype=float))
        return (one, t), (0 * one, one), (0 * one, 0 * one)

    def evaluate(self, u1, u2, t) -> FieldValues:
        (P, Q), (dP, dQ), (ddP, ddQ) = self._time(t)
        rows = ((self.A1, self.B1), (self.A2, self.B2))
        f = np.array([A(u1, u2) * P + B(u1, u2) * Q for A, B in rows])
        du1 = np.array([A.cu1 * P + B.cu1 * Q for A, B in rows])
        du2 = np.array([A.cu2 * P + B.cu2 * Q for A, B in rows])
        dt = np.array([A(u1, u2) * dP + B(u1, u2) * dQ for A, B in rows])
        dtt = np.array([A(u1, u2) * ddP + B(u1, u2) * ddQ for A, B in rows])
        return FieldValues(f=f, du1=du1, du2=du2, dt=dt, dtt=dtt)

    def __call__(self, u1, u2, t) -> np.ndarray:
        return self.evaluate(u1, u2, t).f

    @property
    def ode_delta(self) -> float:
        """The constant in d^2 f / dt^2 = delta f satisfied by the time basis."""
        if self.basis is Basis.EXP:
            return self.rate**2
        if self.basis is Basis.TRIG:
            return -self.rate**2
        return 0.0

    def coefficient_table(self) -> dict[str, tuple[float, float, float]]:
        return {name: getattr(self, name).as_tuple() for name in ("A1", "B1", "A2", "B2")}


def evaluate_potential(pf: PotentialField, p) -> FieldValues:
    if hasattr(p, "as_array"):
        p = p.as_array()
    u1, u2, t = (float(x) for x in p)
    return pf.evaluate(u1, u2, t)


def _sign_pattern(d3: float, d4: float) -> tuple[int, int]:
    return (1 if d3 > 0 else -1, 1 if d4 > 0 else -1)


def solve_potential(mu: float, beta: float, C: float, D: float) -> PotentialField:
    params = delta_coefficients(mu, beta)
    d1, d2, d3, d4 = params.delta1, params.delta2, params.delta3, params.delta4
    case = params.case
    common = dict(C=C, D=D, mu=mu, beta=beta)

    if case is Case.CASE_III:
        flat = abs(mu - 1.0) < DELTA_ZERO and abs(beta) < DELTA_ZERO
        return PotentialField(
            case=case,
            family=Family.FLAT_SPECIAL if flat else Family.NONSASAKIAN,
            basis=Basis.LINEAR,
            rate=0.0,
            A1=Affine(d1, 0.0, C),
            A2=Affine(0.0, d2, D),
            B1=Affine(0.0, 0.0, -d3 * D),
            B2=Affine(0.0, 0.0, -d4 * C),
            **common,
        )

    s3, s4 = math.sqrt(abs(d3)), math.sqrt(abs(d4))
    pattern = _sign_pattern(d3, d4)
    if case is Case.CASE_I:
        if pattern == (1, 1):
            c1t, dd1, c2t, dd2 = -s3 * C, s3 * D, s4 * C, s4 * D
        elif pattern == (-1, -1):
            c1t, dd1, c2t, dd2 = s3 * C, -s3 * D, s4 * C, s4 * D
        else:
            raise AssertionError(f"delta > 0 with mixed signs {pattern}")
        return PotentialField(
            case=case,
            family=Family.NONSASAKIAN,
            basis=Basis.EXP,
            rate=math.sqrt(params.delta),
            A1=Affine(d1 / 2, d1 / 2, c1t),
            B1=Affine(d1 / 2, d1 / 2, dd1),
            A2=Affine(-d1 / 2, d2 / 2, c2t),
            B2=Affine(-d1 / 2, d2 / 2, dd2),
            **common,
        )

    if pattern == (1, -1):
        c1t, dd1, c2t, dd2 = -s3 * C, s3 * D, -s4 * D, -s4 * C
    elif pattern == (-1, 1):
        c1t, dd1, c2t, dd2 = s3 * C, s3 * D, s4 * D, -s4 * C
    else:
        raise AssertionError(f"delta < 0 with equal signs {pattern}")
    return PotentialField(
        case=case,
        family=Family.NONSASAKIAN,
        basis=Basis.TRIG,
        rate=math.sqrt(-params.delta),
        A1=Affine(d1, d1, c1t),
        A2=Affine(-d1, d2, c2t),
        B1=Affine(d1, d1, dd1),
        B2=Affine(-d1, d2, dd2),
        **common,
    )


def solve_sasakian_potential(c1: float, C: float, D: float) -> PotentialField:
    if abs(c1 - 2.0) < DELTA_ZERO:
        return PotentialField(
            case=Case.CASE_III,
            family=Family.SPHERE_SPECIAL,
            basis=Basis.TRIG,
            rate=0.0,
            A1=Affine(0.0, 0.0, C),
            A2=Affine(0.0, 0.0, D),
            B1=Affine(0.0, 0.0, 0.0),
            B2=Affine(0.0, 0.0, 0.0),
            C=C,
            D=D,
            c1=c1,
        )
    k = 4.0 - 2.0 * c1
    if c1 > 2:
        a2, b2 = C, D
    else:
        a2, b2 = -C, -D
    return PotentialField(
        case=Case.CASE_II,
        family=Family.SASAKIAN,
        basis=Basis.TRIG,
        rate=abs(c1 - 2.0),
        A1=Affine(k, k, -D),
        A2=Affine(-k, k, a2),
        B1=Affine(k, k, C),
        B2=Affine(-k, k, b2),
        C=C,
        D=D,
        c1=c1,
    )


def pointwise_independent(pf: PotentialField, points=None, rtol: float = 1e-10) -> bool:
    """False when (f1, f2) are proportional (or one vanishes) on the sample grid."""
    if points is None:
        g = np.linspace(-1.0, 1.0, 5)
        points = np.array(np.meshgrid(g, g, g)).reshape(3, -1).T
    values = np.array([pf(*p) for p in points]).T
    sv = np.linalg.svd(values, compute_uv=False)
    if sv[0] == 0:
        return False
    return bool(sv[1] > rtol * sv[0])
