"""Geometry, potential and second-variation machinery.

Positions live in (n, d) arrays; body i's row is its position. The weight
matrix S = diag(s_1, ..., s_d) acts on coordinate axes, and the S-weighted
moment of inertia I_S(q) = sum_i m_i <S q_i, q_i> defines the sphere on which
the potential is studied. A configuration q is S-balanced when

    grad U(q) + lambda * (S x M) q = 0,      lambda = U(q) / I_S(q),

with M the mass matrix. Everything downstream (collinear families, searches,
flows, lifts) is built on the residual, tangent basis and restricted Hessian
implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import CollisionError, NotCriticalError

# Default tolerances. All are relative: to the coordinate scale for the
# geometric ones, to U(q) for the spectral/criticality ones.
TOL_COM = 1e-12
TOL_RES = 1e-10
NULL_TOL = 1e-6
DELTA_COL = 1e-8


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Spectrum:
    """Axis weights s = (s_1, ..., s_d) for S = diag(s), nonincreasing.

    h1_mode asserts the strict hypothesis s_1 > s_2 > ... > s_d = 1 under
    which non-collinear balanced configurations cannot be central; it is
    validated on construction and recorded for downstream reporting.
    """

    s: tuple[float, ...]
    h1_mode: bool = False

    def __post_init__(self):
        s = tuple(float(v) for v in self.s)
        object.__setattr__(self, "s", s)
        if len(s) < 1:
            raise ValueError("spectrum needs at least one axis weight")
        if any(not math.isfinite(v) or v <= 0.0 for v in s):
            raise ValueError("axis weights must be finite and positive")
        if any(a < b for a, b in zip(s, s[1:])):
            raise ValueError("axis weights must be nonincreasing")
        if self.h1_mode:
            if any(a <= b for a, b in zip(s, s[1:])):
                raise ValueError("h1_mode requires strictly decreasing weights")
            if s[-1] != 1.0:
                raise ValueError("h1_mode requires s_d = 1")

    @property
    def d(self) -> int:
        return len(self.s)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.s, dtype=float)

    @property
    def is_isotropic(self) -> bool:
        """True when all weights coincide (S is a multiple of the identity)."""
        return len(set(self.s)) == 1

    @classmethod
    def identity(cls, d: int) -> "Spectrum":
        return cls((1.0,) * d)

    @classmethod
    def planar(cls, s1: float) -> "Spectrum":
        """diag(s1, 1) in the plane, with h1_mode set whenever s1 > 1."""
        return cls((float(s1), 1.0), h1_mode=float(s1) > 1.0)


@dataclass
class Configuration:
    """Positions and masses of n point bodies in R^d.

    The centre of mass is removed on construction (explicit re-centering,
    so the stored q always satisfies sum_i m_i q_i = 0 to machine accuracy).
    """

    q: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        m = np.array(self.masses, dtype=float)
        if q.ndim != 2:
            raise ValueError("q must be an (n, d) array")
        n, d = q.shape
        if n < 2:
            raise ValueError("need at least two bodies")
        if d < 1:
            raise ValueError("need at least one coordinate axis")
        if m.shape != (n,):
            raise ValueError("masses must be a length-n vector")
        if not np.all(np.isfinite(q)) or not np.all(np.isfinite(m)):
            raise ValueError("positions and masses must be finite")
        if np.any(m <= 0.0):
            raise ValueError("masses must be positive")
        com = m @ q / m.sum()
        scale = np.max(np.abs(q))
        if np.max(np.abs(com)) > TOL_COM * max(scale, 1e-300):
            q = q - com
        self.q = q
        self.masses = m

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def d(self) -> int:
        return self.q.shape[1]

    @property
    def scale(self) -> float:
        """Coordinate scale |q|_inf used by the relative tolerances."""
        return float(np.max(np.abs(self.q)))

    def replace_q(self, q: np.ndarray) -> "Configuration":
        return Configuration(q, self.masses)


class InertiaTriple(tuple):
    """(index, nullity, coindex) of the restricted second variation."""

    __slots__ = ()

    def __new__(cls, index: int, nullity: int, coindex: int):
        return super().__new__(cls, (int(index), int(nullity), int(coindex)))

    @property
    def index(self) -> int:
        return self[0]

    @property
    def nullity(self) -> int:
        return self[1]

    @property
    def coindex(self) -> int:
        return self[2]

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"InertiaTriple(index={self[0]}, nullity={self[1]}, coindex={self[2]})"


# ---------------------------------------------------------------------------
# separations and the collision guard


def separations(config: Configuration) -> np.ndarray:
    """Pairwise distance matrix with +inf on the diagonal."""
    diff = config.q[None, :, :] - config.q[:, None, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(r, np.inf)
    return r


def min_separation(config: Configuration) -> float:
    return float(separations(config).min())


def check_collision(config: Configuration, delta: float = DELTA_COL) -> None:
    """Raise CollisionError when any pair is closer than delta * scale."""
    scale = config.scale
    if scale == 0.0:
        raise CollisionError("all bodies coincide at the origin")
    if min_separation(config) < delta * scale:
        raise CollisionError(
            f"minimum separation {min_separation(config):.3e} below "
            f"{delta:.1e} * scale"
        )


# ---------------------------------------------------------------------------
# potential, derivatives, inertia


def potential(config: Configuration, guard: bool = True) -> float:
    """Newtonian potential U(q) = sum_{i<j} m_i m_j / |q_i - q_j|."""
    if guard:
        check_collision(config)
    r = separations(config)
    m = config.masses
    mm = np.outer(m, m)
    iu = np.triu_indices(config.n, k=1)
    return float((mm[iu] / r[iu]).sum())


def gradient(config: Configuration, guard: bool = True) -> np.ndarray:
    """Euclidean gradient of U, shape (n, d).

    Sign convention: the equations of motion read M qdd = grad U(q), i.e.
    row i is sum_{j != i} m_i m_j (q_j - q_i) / r_ij^3.
    """
    if guard:
        check_collision(config)
    q, m = config.q, config.masses
    diff = q[None, :, :] - q[:, None, :]          # diff[i, j] = q_j - q_i
    r = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(r, np.inf)
    w = np.outer(m, m) / r**3
    return np.einsum("ij,ijk->ik", w, diff)


def hessian(config: Configuration, guard: bool = True) -> np.ndarray:
    """Second derivative of U as an (n*d, n*d) symmetric matrix.

    Off-diagonal body blocks are (m_i m_j / r^3)(I - 3 u u^T) with u the
    unit separation vector; diagonal blocks make the block rows sum to zero
    (translation invariance).
    """
    if guard:
        check_collision(config)
    q, m = config.q, config.masses
    n, d = config.n, config.d
    H = np.zeros((n * d, n * d))
    eye = np.eye(d)
    for i in range(n):
        for j in range(i + 1, n):
            u = q[j] - q[i]
            r = np.linalg.norm(u)
            u = u / r
            block = (m[i] * m[j] / r**3) * (eye - 3.0 * np.outer(u, u))
            H[i * d:(i + 1) * d, j * d:(j + 1) * d] = block
            H[j * d:(j + 1) * d, i * d:(i + 1) * d] = block
            H[i * d:(i + 1) * d, i * d:(i + 1) * d] -= block
            H[j * d:(j + 1) * d, j * d:(j + 1) * d] -= block
    return H


def moment_of_inertia(config: Configuration) -> float:
    """Unweighted I(q) = sum_i m_i |q_i|^2."""
    return float(np.einsum("i,ij,ij->", config.masses, config.q, config.q))


def moment_of_inertia_s(config: Configuration, spectrum: Spectrum) -> float:
    """S-weighted I_S(q) = sum_i m_i <S q_i, q_i>."""
    _check_dims(config, spectrum)
    s = spectrum.array
    return float(np.einsum("i,j,ij,ij->", config.masses, s, config.q, config.q))


def weight_vector(config: Configuration, spectrum: Spectrum) -> np.ndarray:
    """Flattened diagonal of (S x M): entry (i, k) is m_i * s_k."""
    _check_dims(config, spectrum)
    return np.repeat(config.masses, config.d) * np.tile(spectrum.array, config.n)


def _check_dims(config: Configuration, spectrum: Spectrum) -> None:
    if spectrum.d != config.d:
        raise ValueError(
            f"spectrum has {spectrum.d} weights but configuration is {config.d}-dimensional"
        )


# ---------------------------------------------------------------------------
# balance residual and normalization


def sbc_residual(config: Configuration, spectrum: Spectrum):
    """Residual of the S-balance equation and the multiplier lambda.

    Returns (G, lam) with G = grad U(q) + lam * (S x M) q as an (n, d)
    array and lam = U(q) / I_S(q). G vanishes exactly at an S-balanced
    configuration.
    """
    _check_dims(config, spectrum)
    g = gradient(config)
    u = potential(config, guard=False)
    i_s = moment_of_inertia_s(config, spectrum)
    lam = u / i_s
    G = g + lam * (config.masses[:, None] * spectrum.array[None, :]) * config.q
    return G, lam


def residual_norm(config: Configuration, spectrum: Spectrum) -> float:
    G, _ = sbc_residual(config, spectrum)
    return float(np.linalg.norm(G))


def normalize(config: Configuration, spectrum: Spectrum) -> Configuration:
    """Rescale onto the sphere I_S = 1 (centre of mass is untouched)."""
    i_s = moment_of_inertia_s(config, spectrum)
    if i_s <= 0.0:
        raise ValueError("cannot normalize a configuration with I_S = 0")
    return config.replace_q(config.q / math.sqrt(i_s))


# ---------------------------------------------------------------------------
# tangent space and restricted second variation


def tangent_basis(config: Configuration, spectrum: Spectrum) -> np.ndarray:
    """Orthonormal basis of the constrained tangent space at q.

    The space is {v : sum_i m_i v_i = 0, <(S x M) q, v> = 0}, of dimension
    d(n-1) - 1, and the returned (n*d, k) matrix V has columns orthonormal
    in the S-weighted mass product: V^T diag(w) V = I with w from
    weight_vector. Construction is Gram-Schmidt over the d translation
    directions, the radial direction q, then the canonical basis vectors in
    index order, so the output is deterministic.
    """
    _check_dims(config, spectrum)
    n, d = config.n, config.d
    w = weight_vector(config, spectrum)
    dim = n * d - d - 1

    def wdot(a, b):
        return float(np.dot(a * w, b))

    basis: list[np.ndarray] = []

    def push(vec) -> bool:
        v = vec.astype(float).ravel().copy()
        norm0 = math.sqrt(wdot(v, v))
        if norm0 == 0.0:
            return False
        for b in basis:
            v -= wdot(b, v) * b
        # one re-orthogonalization pass keeps the basis clean
        for b in basis:
            v -= wdot(b, v) * b
        norm = math.sqrt(wdot(v, v))
        if norm < 1e-10 * norm0:
            return False
        basis.append(v / norm)
        return True

    for k in range(d):
        t = np.zeros((n, d))
        t[:, k] = 1.0
        push(t)
    push(config.q)
    n_constraints = len(basis)
    if n_constraints != d + 1:
        raise ValueError("degenerate configuration: constraints are dependent")
    for idx in range(n * d):
        if len(basis) - n_constraints == dim:
            break
        e = np.zeros(n * d)
        e[idx] = 1.0
        push(e)
    V = np.stack(basis[n_constraints:], axis=1)
    if V.shape[1] != dim:
        raise ValueError("failed to build a full tangent basis")
    return V


def ambient_balance_hessian(config: Configuration, spectrum: Spectrum) -> np.ndarray:
    """Unrestricted second-variation form D^2 U + lambda * (S x M).

    Exposed read-only for cross-checks; the canonical object is
    restricted_hessian, whose inertia this form reproduces through the
    generalized eigenproblem on the tangent space.
    """
    _, lam = sbc_residual(config, spectrum)
    w = weight_vector(config, spectrum)
    return hessian(config) + lam * np.diag(w)


def _restricted_hessian_any(config: Configuration, spectrum: Spectrum):
    """Restricted second variation without the criticality gate.

    Used by searches at non-critical iterates, where the same matrix serves
    as the Newton model. Returns (A, V, g_red, lam) with g_red = V^T grad U.
    """
    V = tangent_basis(config, spectrum)
    g = gradient(config)
    u = potential(config, guard=False)
    i_s = moment_of_inertia_s(config, spectrum)
    lam = u / i_s
    w = weight_vector(config, spectrum)
    H = hessian(config, guard=False) + lam * np.diag(w)
    A = V.T @ H @ V
    A = 0.5 * (A + A.T)
    g_red = V.T @ g.ravel()
    return A, V, g_red, lam


def restricted_hessian(
    config: Configuration, spectrum: Spectrum, tol_res: float = TOL_RES
) -> np.ndarray:
    """Second variation of the constrained problem at a critical point.

    Matrix of the form D^2 U + lambda (S x M) on the tangent basis from
    tangent_basis (orthonormal in the S-weighted mass product); shape
    (k, k) with k = d(n-1) - 1. Raises NotCriticalError when the balance
    residual exceeds tol_res * U(q).
    """
    G, _ = sbc_residual(config, spectrum)
    u = potential(config, guard=False)
    if np.linalg.norm(G) > tol_res * u:
        raise NotCriticalError(
            f"balance residual {np.linalg.norm(G):.3e} exceeds {tol_res:.1e} * U"
        )
    A, _, _, _ = _restricted_hessian_any(config, spectrum)
    return A


def inertia_indices(
    config: Configuration,
    spectrum: Spectrum,
    null_tol: float = NULL_TOL,
    tol_res: float = TOL_RES,
) -> InertiaTriple:
    """Morse index, nullity and coindex of the restricted second variation.

    Eigenvalues within null_tol * U(q) of zero count as null; the rest
    split by sign. The three parts always sum to d(n-1) - 1.
    """
    A = restricted_hessian(config, spectrum, tol_res=tol_res)
    u = potential(config, guard=False)
    ev = eigh(A, eigvals_only=True)
    gap = null_tol * u
    neg = int(np.sum(ev < -gap))
    nul = int(np.sum(np.abs(ev) <= gap))
    pos = int(np.sum(ev > gap))
    return InertiaTriple(neg, nul, pos)


# ---------------------------------------------------------------------------
# shared JSON document


def to_document(config: Configuration, spectrum: Spectrum) -> dict:
    """Plain-dict form of (configuration, spectrum) for JSON interchange."""
    return {
        "n": config.n,
        "d": config.d,
        "masses": [float(v) for v in config.masses],
        "q": [[float(x) for x in row] for row in config.q],
        "S": [float(v) for v in spectrum.s],
    }


def from_document(doc: dict) -> tuple[Configuration, Spectrum]:
    """Inverse of to_document; validates the embedded shape data."""
    try:
        n, d = int(doc["n"]), int(doc["d"])
        masses = doc["masses"]
        q = doc["q"]
        s = doc["S"]
    except KeyError as exc:
        raise ValueError(f"configuration document missing key {exc}") from exc
    q = np.array(q, dtype=float)
    if q.shape != (n, d):
        raise ValueError("q does not match the declared (n, d)")
    if len(masses) != n:
        raise ValueError("masses do not match the declared n")
    if len(s) != d:
        raise ValueError("S does not match the declared d")
    strict = all(a > b for a, b in zip(s, s[1:])) and float(s[-1]) == 1.0
    return Configuration(q, np.array(masses, dtype=float)), Spectrum(
        tuple(float(v) for v in s), h1_mode=strict and d > 1
    )
