"""Collinear balanced configurations along a coordinate axis.

For every ordering of the bodies on a line there is exactly one collinear
central configuration (Moulton), and shrinking it by 1/sqrt(s_j) places a
balanced configuration on coordinate axis j. The spectral data of the
associated force matrix B then classifies the restricted Hessian of each
such point without assembling it: the axis block always contributes
coindex n-2, and each transverse direction i contributes according to the
signs of eta_l + (s_i/s_j) * U(q_hat) over the eigenvalue groups eta_l of
M^{-1} B(q_hat).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .core import (
    Configuration,
    InertiaTriple,
    Spectrum,
    inertia_indices,
    moment_of_inertia_s,
    normalize,
    potential,
    residual_norm,
)
from .errors import (
    NoConvergence,
    NotCollinearError,
    SpectrumAnomalyError,
    UnsupportedCase,
)

GAP_TOL = 1e-13          # convergence of the gap-equation residual
OFF_AXIS_TOL = 1e-12     # how exactly "collinear" must hold coordinate-wise
GROUP_TOL = 1e-8         # eigenvalue grouping, relative to U(q_hat)
DEGENERATE_TOL = 1e-10   # threshold-equality detection, relative to U(q_hat)


# ---------------------------------------------------------------------------
# force matrix of a collinear configuration


def collinear_axis(config: Configuration, tol: float = OFF_AXIS_TOL) -> int:
    """1-based index of the axis the configuration lies on.

    Raises NotCollinearError when any off-axis coordinate exceeds
    tol * max(1, scale).
    """
    spread = config.q.max(axis=0) - config.q.min(axis=0)
    axis = int(np.argmax(spread))
    bound = tol * max(1.0, config.scale)
    off = np.delete(config.q, axis, axis=1)
    if np.max(np.abs(off)) > bound:
        raise NotCollinearError(
            f"off-axis coordinates up to {np.max(np.abs(off)):.3e} exceed {bound:.1e}"
        )
    return axis + 1


def _b_matrix_1d(masses: np.ndarray, x: np.ndarray) -> np.ndarray:
    n = len(x)
    B = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                B[i, j] = masses[i] * masses[j] / abs(x[i] - x[j]) ** 3
    np.fill_diagonal(B, -B.sum(axis=1))
    return B


def b_matrix(config: Configuration) -> np.ndarray:
    """Symmetric force matrix B of an axis-collinear configuration.

    Off-diagonal entries are m_i m_j / r_ij^3 and rows sum to zero, so that
    the axis component of grad U equals B x with x the axis coordinates.
    """
    axis = collinear_axis(config)
    return _b_matrix_1d(config.masses, config.q[:, axis - 1])


def _potential_1d(masses: np.ndarray, x: np.ndarray) -> float:
    u = 0.0
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            u += masses[i] * masses[j] / abs(x[i] - x[j])
    return u


# ---------------------------------------------------------------------------
# spectral data of the underlying central configuration


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalue structure of M^{-1} B at a unit-norm collinear CC.

    groups lists (eta_l, multiplicity) in decreasing eta order; the leading
    group is always (-u_hat, 1). thresholds are the ratios -eta_l / u_hat
    for l >= 1, in increasing order: crossing one of them with the weight
    ratio s_i/s_j changes the transverse index contribution.
    """

    n: int
    u_hat: float
    eigenvalues: tuple[float, ...]
    groups: tuple[tuple[float, int], ...]

    @property
    def thresholds(self) -> tuple[float, ...]:
        return tuple(-eta / self.u_hat for eta, _ in self.groups[1:])


def ccc_spectrum(record: "CollinearRecord", group_tol: float = GROUP_TOL) -> SpectralData:
    """Verified, grouped spectrum of M^{-1} B for a solved ordering.

    Checks the two structural eigenvalues (a simple 0 from translations and
    a simple -U(q_hat) from the radial direction), requires every remaining
    eigenvalue to sit strictly below -U(q_hat), and groups the rest to
    group_tol * U(q_hat). Raises SpectrumAnomalyError otherwise.
    """
    m = record.masses
    x = record.cc_positions
    u = _potential_1d(m, x)
    B = _b_matrix_1d(m, x)
    root_m = np.sqrt(m)
    C = B / np.outer(root_m, root_m)
    ev = np.sort(eigh(C, eigvals_only=True))
    tol = group_tol * u

    remaining = list(ev)
    i_zero = int(np.argmin(np.abs(remaining)))
    if abs(remaining[i_zero]) > tol:
        raise SpectrumAnomalyError("no translation eigenvalue near zero")
    remaining.pop(i_zero)
    i_rad = int(np.argmin(np.abs(np.array(remaining) + u)))
    if abs(remaining[i_rad] + u) > tol:
        raise SpectrumAnomalyError("no radial eigenvalue near -U(q_hat)")
    remaining.pop(i_rad)
    remaining.sort(reverse=True)
    if remaining and remaining[0] > -u - tol:
        raise SpectrumAnomalyError(
            f"eigenvalue {remaining[0]:.6e} not strictly below -U = {-u:.6e}"
        )

    groups: list[tuple[float, int]] = [(-u, 1)]
    for val in remaining:
        if len(groups) > 1 and abs(val - groups[-1][0]) <= tol:
            eta, mult = groups[-1]
            groups[-1] = ((eta * mult + val) / (mult + 1), mult + 1)
        else:
            groups.append((val, 1))
    return SpectralData(
        n=len(m),
        u_hat=u,
        eigenvalues=tuple(float(v) for v in ev),
        groups=tuple((float(e), int(a)) for e, a in groups),
    )


def predicted_indices(
    spectral: SpectralData,
    spectrum: Spectrum,
    axis: int,
    degenerate_tol: float = DEGENERATE_TOL,
) -> InertiaTriple:
    """Closed-form inertia triple of an axis-collinear balanced point.

    The axis block contributes coindex n-2 for every weight choice. Each
    transverse direction i adds n-1 eigenvalue signs determined by
    eta_l + (s_i/s_j) U(q_hat): for s_i < s_j that is index n-1, for
    s_i = s_j index n-2 plus one null direction, and for d = 2 with the
    wide axis transverse the threshold rules in terms of -eta_l / U apply,
    including the equality (degenerate) branch. For d > 2 with a transverse
    weight larger than the axis weight no closed form is implemented and
    UnsupportedCase is raised; callers fall back to the computed triple.
    """
    d = spectrum.d
    if not 1 <= axis <= d:
        raise ValueError(f"axis must be in 1..{d}")
    n = spectral.n
    s = spectrum.s
    s_axis = s[axis - 1]
    u = spectral.u_hat

    rhos = [s[i] / s_axis for i in range(d) if i != axis - 1]
    if d > 2 and any(r > 1.0 + degenerate_tol for r in rhos):
        raise UnsupportedCase(
            "no closed-form transverse rule for d > 2 with a weight above the axis weight"
        )

    index, nullity, coindex = 0, 0, n - 2
    for rho in rhos:
        for eta, mult in spectral.groups:
            val = eta + rho * u
            if abs(val) <= degenerate_tol * u:
                nullity += mult
            elif val > 0:
                coindex += mult
            else:
                index += mult
    return InertiaTriple(index, nullity, coindex)


# ---------------------------------------------------------------------------
# the gap-coordinate Newton solve


def _ordered_cc_gaps(
    m_ord: np.ndarray,
    initial_gaps: np.ndarray | None = None,
    tol: float = GAP_TOL,
    max_iter: int = 200,
):
    """Solve the collinear central-configuration equations for one ordering.

    Unknowns are the n-1 positive gaps between consecutive bodies; the
    multiplier is pinned to 1 and the overall scale is fixed afterwards.
    Equations are consecutive differences of F_i = [M^{-1} grad U]_i + y_i,
    which are translation invariant, with an analytic Jacobian and damped
    Newton steps that keep every gap positive.
    """
    n = len(m_ord)
    g = (
        np.full(n - 1, float(np.sum(m_ord) / n) ** (1.0 / 3.0))
        if initial_gaps is None
        else np.array(initial_gaps, dtype=float)
    )
    if np.any(g <= 0):
        raise ValueError("initial gaps must be positive")

    def system(gaps):
        y = np.concatenate(([0.0], np.cumsum(gaps)))
        diff = y[None, :] - y[:, None]
        r = np.abs(diff)
        np.fill_diagonal(r, np.inf)
        F = (m_ord[None, :] * diff / r**3).sum(axis=1) + y
        R = F[1:] - F[:-1]
        # dF_i/dy_j = -2 m_j / r^3 (j != i), diagonal makes translations neutral
        J_F = -2.0 * m_ord[None, :] / r**3
        np.fill_diagonal(J_F, 0.0)
        np.fill_diagonal(J_F, -J_F.sum(axis=1) + 1.0)
        D = J_F[1:] - J_F[:-1]
        # chain rule through y_i = sum_{k < i} g_k
        P = np.tril(np.ones((n, n - 1)), k=-1)
        return R, D @ P

    R, J = system(g)
    for it in range(max_iter):
        if np.max(np.abs(R)) < tol:
            return g, float(np.max(np.abs(R))), it
        step = np.linalg.solve(J, -R)
        t = 1.0
        while np.any(g + t * step <= 0.0):
            t *= 0.5
            if t < 1e-14:
                raise NoConvergence("positivity backtracking underflow")
        norm0 = np.linalg.norm(R)
        while t >= 1e-14:
            R_new, J_new = system(g + t * step)
            if np.linalg.norm(R_new) < norm0:
                g = g + t * step
                R, J = R_new, J_new
                break
            t *= 0.5
        else:
            raise NoConvergence("gap Newton stalled")
    raise NoConvergence(f"gap Newton did not reach {tol:.1e} in {max_iter} iterations")


@dataclass
class CollinearRecord:
    """One solved collinear balanced configuration.

    ordering and axis are 1-based (body labels left to right along the
    axis, and the coordinate axis carrying the weight s_axis). config is
    normalized to I_S = 1; cc_positions holds the unit-mass-norm collinear
    central configuration the record was built from, indexed by body.
    """

    ordering: tuple[int, ...]
    axis: int
    spectrum: Spectrum
    masses: np.ndarray
    config: Configuration
    cc_positions: np.ndarray
    lam: float
    residual: float
    gap_residual: float
    iterations: int
    spectral: SpectralData | None = None
    predicted: InertiaTriple | None = None
    computed: InertiaTriple | None = None


def moulton_solve(
    masses,
    ordering,
    axis: int,
    spectrum: Spectrum,
    initial_gaps: np.ndarray | None = None,
    tol: float = GAP_TOL,
) -> CollinearRecord:
    """Collinear balanced configuration for one ordering on one axis.

    ordering is a permutation of (1..n) listing bodies left to right;
    axis is the 1-based coordinate axis. The solve runs in gap
    coordinates from an equispaced start (or initial_gaps), the resulting
    central configuration is normalized to unit mass norm, and the balanced
    configuration is that line shrunk by 1/sqrt(s_axis) on the axis.
    """
    m = np.array(masses, dtype=float)
    n = len(m)
    if sorted(ordering) != list(range(1, n + 1)):
        raise ValueError("ordering must be a permutation of 1..n")
    if not 1 <= axis <= spectrum.d:
        raise ValueError(f"axis must be in 1..{spectrum.d}")
    if np.any(m <= 0):
        raise ValueError("masses must be positive")

    order0 = [b - 1 for b in ordering]
    m_ord = m[order0]
    gaps, gap_res, iters = _ordered_cc_gaps(m_ord, initial_gaps, tol=tol)

    y = np.concatenate(([0.0], np.cumsum(gaps)))
    y -= float(m_ord @ y / m_ord.sum())
    y /= math.sqrt(float(m_ord @ y**2))

    x_hat = np.empty(n)
    x_hat[order0] = y
    s_axis = spectrum.s[axis - 1]
    q = np.zeros((n, spectrum.d))
    q[:, axis - 1] = x_hat / math.sqrt(s_axis)
    config = normalize(Configuration(q, m), spectrum)
    lam = potential(config) / moment_of_inertia_s(config, spectrum)
    return CollinearRecord(
        ordering=tuple(int(b) for b in ordering),
        axis=int(axis),
        spectrum=spectrum,
        masses=m,
        config=config,
        cc_positions=x_hat,
        lam=float(lam),
        residual=residual_norm(config, spectrum),
        gap_residual=gap_res,
        iterations=iters,
    )


# ---------------------------------------------------------------------------
# enumeration and thresholds


def enumerate_csbc(
    masses,
    spectrum: Spectrum,
    threads: int = 1,
) -> list[CollinearRecord]:
    """All d * n! collinear balanced configurations, classified.

    One record per (ordering, axis), sorted by (axis, ordering). Each
    carries the verified spectral data, the closed-form predicted triple
    where one exists (None where UnsupportedCase applies), and the inertia
    triple computed from the restricted Hessian.
    """
    m = np.array(masses, dtype=float)
    n = len(m)
    jobs = [
        (axis, ordering)
        for axis in range(1, spectrum.d + 1)
        for ordering in itertools.permutations(range(1, n + 1))
    ]

    def build(job) -> CollinearRecord:
        axis, ordering = job
        rec = moulton_solve(m, ordering, axis, spectrum)
        rec.spectral = ccc_spectrum(rec)
        try:
            rec.predicted = predicted_indices(rec.spectral, spectrum, axis)
        except UnsupportedCase:
            rec.predicted = None
        rec.computed = inertia_indices(rec.config, spectrum)
        return rec

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(build, jobs))
    return [build(job) for job in jobs]


@dataclass(frozen=True)
class ThresholdReport:
    """Degeneracy thresholds -eta_l / U(q_hat) per ordering."""

    per_ordering: dict
    global_min: float
    global_max: float


def degeneracy_thresholds(masses) -> ThresholdReport:
    """Threshold ratios for every ordering (axis independent).

    A transverse weight ratio crossing one of these values changes the
    predicted inertia triple; at equality the point is degenerate.
    """
    m = np.array(masses, dtype=float)
    n = len(m)
    if n < 3:
        raise ValueError("degeneracy thresholds require n >= 3")
    spec = Spectrum.identity(1)
    per: dict[tuple[int, ...], tuple[float, ...]] = {}
    for ordering in itertools.permutations(range(1, n + 1)):
        rec = moulton_solve(m, ordering, 1, spec)
        per[ordering] = ccc_spectrum(rec).thresholds
    lows = [t[0] for t in per.values()]
    highs = [t[-1] for t in per.values()]
    return ThresholdReport(
        per_ordering=per, global_min=float(min(lows)), global_max=float(max(highs))
    )
