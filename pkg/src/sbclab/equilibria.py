"""Rigid two-plane rotations generated by planar balanced configurations.

A planar configuration balanced for diag(s, 1) spins into an exact
n-body solution in R^4: the first planar coordinate rotates in the
(1,2)-plane at omega_1 = sqrt(lambda s), the second in the (3,4)-plane at
omega_2 = sqrt(lambda).  The motion is periodic precisely when the
frequency ratio omega_1/omega_2 = sqrt(s) is rational, otherwise the
orbit fills a torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import TOL_RES, Configuration, gradient, potential, sbc_residual
from .errors import NotPlanarError
from .solver import SBCSolution

RATIONAL_TOL = 1e-13
MAX_DENOMINATOR = 10**6


@dataclass(frozen=True)
class RelativeEquilibriumOrbit:
    """Closed-form rigid rotation of a planar balanced configuration."""

    base: SBCSolution
    s: float
    lam: float
    omega: tuple[float, float]

    @property
    def masses(self) -> np.ndarray:
        return self.base.config.masses

    @property
    def embedding(self) -> np.ndarray:
        """4x2 matrix taking planar coordinates to the t=0 position."""
        return np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]])

    def _columns(self):
        q = self.base.config.q
        return q[:, 0], q[:, 1]

    def positions(self, t: float) -> np.ndarray:
        x, y = self._columns()
        w1, w2 = self.omega
        return np.column_stack(
            (
                x * math.cos(w1 * t),
                x * math.sin(w1 * t),
                y * math.cos(w2 * t),
                y * math.sin(w2 * t),
            )
        )

    def velocities(self, t: float) -> np.ndarray:
        x, y = self._columns()
        w1, w2 = self.omega
        return np.column_stack(
            (
                -w1 * x * math.sin(w1 * t),
                w1 * x * math.cos(w1 * t),
                -w2 * y * math.sin(w2 * t),
                w2 * y * math.cos(w2 * t),
            )
        )

    def accelerations(self, t: float) -> np.ndarray:
        w1, w2 = self.omega
        out = self.positions(t)
        out[:, :2] *= -(w1**2)
        out[:, 2:] *= -(w2**2)
        return out


def lift(
    base: SBCSolution,
    s: float | None = None,
    tol_res: float = TOL_RES,
) -> RelativeEquilibriumOrbit:
    """Spin a planar diag(s, 1)-balanced configuration up to an R^4 orbit.

    The base must be genuinely planar and balanced: the residual is
    recomputed here rather than trusted from the record.  s defaults to
    the first weight of the base's spectrum and must match it when given
    explicitly.  s = 1 is the degenerate central case (both planes rotate
    at the same rate); s < 1 is rejected since the weights are ordered.
    """
    config = base.config
    if config.d != 2:
        raise NotPlanarError(f"lift needs a planar base, got d = {config.d}")
    weights = base.spectrum.s
    if len(weights) != 2 or weights[1] != 1.0:
        raise ValueError(f"base spectrum must be (s, 1), got {weights}")
    if s is None:
        s = weights[0]
    elif s != weights[0]:
        raise ValueError(f"s = {s} disagrees with the base spectrum {weights}")
    if s < 1.0:
        raise ValueError("the first weight must satisfy s >= 1")

    g, lam = sbc_residual(config, base.spectrum)
    u = potential(config)
    resid = float(np.linalg.norm(g))
    if resid > tol_res * u:
        raise ValueError(
            f"base is not balanced: residual {resid:.3e} exceeds {tol_res * u:.3e}"
        )
    return RelativeEquilibriumOrbit(
        base=base,
        s=float(s),
        lam=float(lam),
        omega=(math.sqrt(lam * s), math.sqrt(lam)),
    )


def newton_residual(
    orbit: RelativeEquilibriumOrbit,
    t_samples=1000,
    t_max: float = 20.0,
) -> float:
    """Worst relative defect of Newton's equations along the orbit.

    Evaluates ||qddot(t) - M^{-1} grad U(q(t))|| / ||M^{-1} grad U(q(t))||
    with the acceleration taken from the closed-form rotation (never a
    finite difference), at t_samples points spanning [0, t_max] — or at
    the explicit times given as an array.
    """
    if np.isscalar(t_samples):
        times = np.linspace(0.0, t_max, int(t_samples))
    else:
        times = np.asarray(t_samples, dtype=float)
    masses = orbit.masses
    worst = 0.0
    for t in times:
        q4 = orbit.positions(float(t))
        field = gradient(Configuration(q4, masses)) / masses[:, None]
        defect = orbit.accelerations(float(t)) - field
        worst = max(worst, float(np.linalg.norm(defect) / np.linalg.norm(field)))
    return worst


@dataclass(frozen=True)
class PeriodicityReport:
    kind: str  # "periodic" | "quasi_periodic"
    ratio: float
    best_fraction: Fraction
    mismatch: float
    period: float | None
    closure: float | None


def classify_periodicity(
    orbit: RelativeEquilibriumOrbit,
    rational_tol: float = RATIONAL_TOL,
    max_denominator: int = MAX_DENOMINATOR,
) -> PeriodicityReport:
    """Decide periodic vs quasi-periodic from the frequency ratio.

    The ratio omega_1/omega_2 = sqrt(s) is tested against its best
    rational approximation p/q with q <= max_denominator (continued
    fractions via Fraction.limit_denominator).  Within rational_tol the
    orbit closes after T = 2 pi q / omega_2 — q full turns of the slow
    plane and p of the fast one — and the closure defect ||q(T) - q(0)||
    is reported; otherwise the motion is quasi-periodic.

    Note the criterion is rationality of sqrt(s), not of s: s = 2 is
    rational yet gives ratio sqrt(2), hence a quasi-periodic orbit.
    """
    w1, w2 = orbit.omega
    ratio = w1 / w2
    best = Fraction(ratio).limit_denominator(max_denominator)
    mismatch = abs(ratio - float(best))
    if mismatch > rational_tol:
        return PeriodicityReport(
            kind="quasi_periodic",
            ratio=ratio,
            best_fraction=best,
            mismatch=mismatch,
            period=None,
            closure=None,
        )
    period = 2.0 * math.pi * best.denominator / w2
    closure = float(
        np.linalg.norm(orbit.positions(period) - orbit.positions(0.0))
    )
    return PeriodicityReport(
        kind="periodic",
        ratio=ratio,
        best_fraction=best,
        mismatch=mismatch,
        period=period,
        closure=closure,
    )
