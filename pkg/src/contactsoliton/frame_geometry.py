"""Connection, curvature and contact tensors of a 3D contact metric frame.

Everything is expressed in the orthonormal frame ``(e1, e2, xi)`` with
``phi e1 = e2`` and ``h e1 = mu e1``.  Array indices are zero based, so
index 2 is the Reeb direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

E1, E2, XI = 0, 1, 2


@dataclass(frozen=True)
class StructureFunctions:
    """Constant frame data ``(a, b, c, mu)`` of a contact metric 3-manifold."""

    a: float
    b: float
    c: float
    mu: float

    def __post_init__(self):
        for name in ("a", "b", "c", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"structure function {name} must be finite")
        if self.mu < 0:
            raise ValueError("mu must be non-negative (choose e1 with h e1 = mu e1, mu >= 0)")

    @property
    def sasakian(self) -> bool:
        return self.mu == 0


@dataclass(frozen=True)
class FrameConnection:
    """``gamma[i, j, k]`` is the e_k coefficient of nabla_{e_i} e_j."""

    gamma: np.ndarray

    def covariant(self, i: int, j: int) -> np.ndarray:
        return self.gamma[i, j].copy()

    def brackets(self) -> np.ndarray:
        """``out[i, j]`` holds the frame components of ``[e_i, e_j]`` (torsion free)."""
        return self.gamma - self.gamma.transpose(1, 0, 2)


@dataclass(frozen=True)
class CurvatureTensor:
    """``R[i, j, k, l] = g(R(e_i, e_j) e_k, e_l)``."""

    R: np.ndarray

    def sectional(self, i: int, j: int) -> float:
        return float(self.R[i, j, j, i])

    def ricci(self) -> RicciMatrix:
        # Ric(Y, Z) = sum_i g(R(e_i, Y) Z, e_i)
        return RicciMatrix(np.einsum("iyzi->yz", self.R))

    def symmetry_defects(self) -> dict[str, float]:
        R = self.R
        bianchi = R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)
        return {
            "antisym_ij": float(np.max(np.abs(R + R.transpose(1, 0, 2, 3)))),
            "antisym_kl": float(np.max(np.abs(R + R.transpose(0, 1, 3, 2)))),
            "pair_symmetry": float(np.max(np.abs(R - R.transpose(2, 3, 0, 1)))),
            "bianchi": float(np.max(np.abs(bianchi))),
        }


@dataclass(frozen=True)
class RicciMatrix:
    ric: np.ndarray

    def __post_init__(self):
        ric = np.asarray(self.ric, dtype=float)
        object.__setattr__(self, "ric", 0.5 * (ric + ric.T))

    def diagonal(self) -> tuple[float, float, float]:
        return tuple(float(x) for x in np.diag(self.ric))


@dataclass(frozen=True)
class ContactTensors:
    phi: np.ndarray
    h: np.ndarray
    A: np.ndarray
    eta: np.ndarray
    xi: np.ndarray

    @classmethod
    def from_mu(cls, mu: float) -> ContactTensors:
        phi = np.zeros((3, 3))
        # columns are images: phi e1 = e2, phi e2 = -e1
        phi[E2, E1] = 1.0
        phi[E1, E2] = -1.0
        h = np.diag([mu, -mu, 0.0])
        eta = np.array([0.0, 0.0, 1.0])
        return cls(phi=phi, h=h, A=phi @ h, eta=eta, xi=eta.copy())

    def defects(self) -> dict[str, float]:
        I = np.eye(3)
        return {
            "phi_squared": float(np.max(np.abs(self.phi @ self.phi + I - np.outer(self.xi, self.eta)))),
            "h_xi": float(np.max(np.abs(self.h @ self.xi))),
            "h_phi_anticommute": float(np.max(np.abs(self.h @ self.phi + self.phi @ self.h))),
        }


def connection_from_structure(sf: StructureFunctions) -> FrameConnection:
    a, b, c, mu = sf.a, sf.b, sf.c, sf.mu
    g = np.zeros((3, 3, 3))
    g[E1, E1, E2] = b
    g[E1, E2, E1] = -b
    g[E1, E2, XI] = 1 + mu
    g[E1, XI, E2] = -(1 + mu)

    g[E2, E1, E2] = -c
    g[E2, E1, XI] = mu - 1
    g[E2, E2, E1] = c
    g[E2, XI, E1] = 1 - mu

    g[XI, E1, E2] = a
    g[XI, E2, E1] = -a
    return FrameConnection(g)


def jacobiator(conn: FrameConnection) -> float:
    """Max-norm of the Jacobi identity defect of the reconstructed frame brackets.

    Constant-coefficient frames only come from a Lie algebra when this
    vanishes; otherwise the curvature below is formal and the first Bianchi
    identity fails by the same amount.
    """
    br = conn.brackets()
    total = np.zeros(3)
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        total += br[i, j] @ br[:, k]
    return float(np.max(np.abs(total)))


def curvature_from_connection(conn: FrameConnection) -> CurvatureTensor:
    G = conn.gamma
    # nabla_i nabla_j e_k = G[j,k,m] G[i,m,l] e_l  (constant coefficients)
    second = np.einsum("jkm,iml->ijkl", G, G)
    br = conn.brackets()
    torsion_term = np.einsum("ijm,mkl->ijkl", br, G)
    R = second - second.transpose(1, 0, 2, 3) - torsion_term
    return CurvatureTensor(R)


def ricci_operator_lemma1(
    sf: StructureFunctions,
    dmu: dict | None = None,
    diag: dict | None = None,
) -> RicciMatrix:
    """Ricci matrix with the off-diagonal pattern of the structure-function frame.

    ``dmu`` supplies ``xi_mu``, ``e1_mu``, ``e2_mu`` (derivatives of mu along
    the frame); ``diag`` supplies ``ric11`` and ``ric22``, which have no
    closed form in general.
    """
    dmu = dmu or {}
    diag = diag or {}
    xi_mu = dmu.get("xi_mu", 0.0)
    e1_mu = dmu.get("e1_mu", 0.0)
    e2_mu = dmu.get("e2_mu", 0.0)
    ric = np.zeros((3, 3))
    ric[E1, E1] = diag.get("ric11", 0.0)
    ric[E2, E2] = diag.get("ric22", 0.0)
    ric[XI, XI] = 2 * (1 - sf.mu**2)
    ric[E1, E2] = ric[E2, E1] = xi_mu
    ric[E1, XI] = ric[XI, E1] = 2 * sf.b * sf.mu - e2_mu
    ric[E2, XI] = ric[XI, E2] = 2 * sf.c * sf.mu - e1_mu
    return RicciMatrix(ric)


def alpha_beta_identify(
    curv: CurvatureTensor, sf: StructureFunctions, tol: float = 1e-10
) -> tuple[float, float] | None:
    """Recover (alpha, beta) with R(X,Y)xi = alpha(...) + beta(... h ...), or None."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    h = ContactTensors.from_mu(sf.mu).h
    R = curv.R
    k1 = R[E1, XI, XI, E1]
    k2 = R[E2, XI, XI, E2]
    alpha = 0.5 * (k1 + k2)
    beta = 0.0 if sf.mu == 0 else (k1 - k2) / (2 * sf.mu)

    eta = np.array([0.0, 0.0, 1.0])
    expected = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            ei, ej = np.eye(3)[i], np.eye(3)[j]
            vec = alpha * (eta[j] * ei - eta[i] * ej) + beta * (eta[j] * h @ ei - eta[i] * h @ ej)
            expected[i, j] = vec
    actual = R[:, :, XI, :]
    if np.max(np.abs(actual - expected)) > tol:
        return None
    return float(alpha), float(beta)


def eta_parallel_residual(sf: StructureFunctions, dmu: dict | None = None) -> float:
    """max |g((nabla_x h) y, z)| over x, y, z in {e1, e2}."""
    dmu = dmu or {}
    dmu_vec = (dmu.get("e1_mu", 0.0), dmu.get("e2_mu", 0.0))
    G = connection_from_structure(sf).gamma
    eig = (sf.mu, -sf.mu)
    sign = (1.0, -1.0)
    worst = 0.0
    for i in (E1, E2):
        for j in (E1, E2):
            for k in (E1, E2):
                # (nabla_i h) e_j = e_i(mu_j) e_j + (mu_j - mu_k) Gamma_ij^k e_k
                val = (eig[j] - eig[k]) * G[i, j, k]
                if j == k:
                    val += sign[j] * dmu_vec[i]
                worst = max(worst, abs(val))
    return worst
