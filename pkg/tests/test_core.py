"""Unit tests for the geometry / residual / second-variation layer."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sbclab.core import (
    Configuration,
    Spectrum,
    ambient_balance_hessian,
    check_collision,
    from_document,
    gradient,
    hessian,
    inertia_indices,
    min_separation,
    moment_of_inertia,
    moment_of_inertia_s,
    normalize,
    potential,
    residual_norm,
    restricted_hessian,
    sbc_residual,
    tangent_basis,
    to_document,
    weight_vector,
)
from sbclab.errors import CollisionError, NotCriticalError

from oracles import (
    fd_gradient,
    fd_hessian,
    random_configuration,
    symmetric_euler_positions,
)


def equilateral(masses=(1.0, 1.0, 1.0)) -> Configuration:
    q = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
    return Configuration(q, np.array(masses, dtype=float))


def euler_on_axis(axis: int, d: int, scale: float = 1.0) -> Configuration:
    """Equal-mass collinear central configuration placed on a coordinate axis."""
    x = symmetric_euler_positions() * scale
    q = np.zeros((3, d))
    q[:, axis] = x
    return Configuration(q, np.ones(3))


# ---------------------------------------------------------------------------
# construction and validation


def test_configuration_recenters_mass_centre():
    q = np.array([[1.0, 2.0], [3.0, -1.0], [0.0, 0.5]])
    m = np.array([1.0, 2.0, 3.0])
    cfg = Configuration(q, m)
    com = m @ cfg.q / m.sum()
    assert np.linalg.norm(com) < 1e-12 * cfg.scale


@pytest.mark.parametrize(
    "q,m",
    [
        (np.zeros((1, 2)), np.ones(1)),
        (np.zeros((3, 2, 1)), np.ones(3)),
        (np.zeros((2, 2)), np.array([1.0, -1.0])),
        (np.zeros((2, 2)), np.ones(3)),
        (np.array([[np.nan, 0.0], [1.0, 0.0]]), np.ones(2)),
    ],
)
def test_configuration_rejects_bad_input(q, m):
    with pytest.raises(ValueError):
        Configuration(q, m)


def test_spectrum_validation():
    Spectrum((2.0, 1.0), h1_mode=True)
    Spectrum((1.0, 1.0))
    with pytest.raises(ValueError):
        Spectrum((1.0, 2.0))
    with pytest.raises(ValueError):
        Spectrum((2.0, -1.0))
    with pytest.raises(ValueError):
        Spectrum((1.0, 1.0), h1_mode=True)
    with pytest.raises(ValueError):
        Spectrum((2.0, 1.5), h1_mode=True)
    assert Spectrum.planar(2.0).h1_mode
    assert not Spectrum.planar(1.0).h1_mode
    assert Spectrum.identity(3).is_isotropic


def test_collision_guard():
    q = np.array([[0.0, 0.0], [1e-10, 0.0], [1.0, 1.0]])
    with pytest.raises(CollisionError):
        check_collision(Configuration(q, np.ones(3)))
    with pytest.raises(CollisionError):
        potential(Configuration(q, np.ones(3)))


# ---------------------------------------------------------------------------
# potential / gradient / hessian values and identities


def test_potential_two_bodies():
    cfg = Configuration(np.array([[-1.0, 0.0], [1.0, 0.0]]), np.ones(2))
    assert potential(cfg) == pytest.approx(0.5, rel=1e-15)


def test_potential_equilateral():
    assert potential(equilateral()) == pytest.approx(3.0, rel=1e-14)


def test_potential_symmetric_euler():
    cfg = euler_on_axis(0, 2)
    a = 1.0 / math.sqrt(2.0)
    assert potential(cfg) == pytest.approx(5.0 / (2.0 * a), rel=1e-14)


def test_potential_homogeneity():
    rng = np.random.default_rng(11)
    cfg = random_configuration(rng, 4, 3)
    c = 1.7
    scaled = cfg.replace_q(c * cfg.q)
    assert potential(scaled) == pytest.approx(potential(cfg) / c, rel=1e-13)
    assert np.allclose(gradient(scaled), gradient(cfg) / c**2, rtol=1e-12)


def test_euler_identity():
    rng = np.random.default_rng(7)
    for _ in range(5):
        cfg = random_configuration(rng, 4, 2)
        lhs = float(np.sum(gradient(cfg) * cfg.q))
        assert lhs == pytest.approx(-potential(cfg), rel=1e-12)


@pytest.mark.parametrize("n,d", [(3, 2), (4, 2), (3, 3)])
def test_gradient_matches_finite_differences(n, d):
    rng = np.random.default_rng(100 * n + d)
    for _ in range(5):
        cfg = random_configuration(rng, n, d)
        g = gradient(cfg)
        ref = fd_gradient(cfg)
        assert np.linalg.norm(g - ref) <= 1e-6 * np.linalg.norm(ref)


@pytest.mark.parametrize("n,d", [(3, 2), (4, 2), (3, 3)])
def test_hessian_matches_finite_differences(n, d):
    rng = np.random.default_rng(200 * n + d)
    for _ in range(5):
        cfg = random_configuration(rng, n, d)
        H = hessian(cfg)
        ref = fd_hessian(cfg)
        assert np.linalg.norm(H - ref) <= 1e-6 * np.linalg.norm(ref)


def test_hessian_symmetry_and_translation_rows():
    rng = np.random.default_rng(3)
    cfg = random_configuration(rng, 4, 3)
    H = hessian(cfg)
    assert np.allclose(H, H.T, atol=1e-12 * np.linalg.norm(H))
    # a uniform translation of all bodies is in the kernel
    n, d = cfg.n, cfg.d
    for k in range(d):
        t = np.zeros((n, d))
        t[:, k] = 1.0
        assert np.linalg.norm(H @ t.ravel()) < 1e-10 * np.linalg.norm(H)


def test_gradient_equivariance():
    rng = np.random.default_rng(4)
    cfg = random_configuration(rng, 4, 2)
    g = gradient(cfg)
    # permuting bodies permutes gradient rows
    perm = np.array([2, 0, 3, 1])
    cfg_p = Configuration(cfg.q[perm], cfg.masses[perm])
    assert np.allclose(gradient(cfg_p), g[perm], rtol=1e-13)
    # reflecting an axis flips the corresponding gradient column
    refl = cfg.q.copy()
    refl[:, 1] *= -1.0
    g_r = gradient(Configuration(refl, cfg.masses))
    assert np.allclose(g_r[:, 0], g[:, 0], rtol=1e-13)
    assert np.allclose(g_r[:, 1], -g[:, 1], rtol=1e-13)


def test_collinear_hessian_block_structure():
    # on-axis pairs contribute (m_i m_j / r^3) diag(-2, 1, ..., 1)
    cfg = Configuration(np.array([[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), np.ones(2))
    H = hessian(cfg)
    r3 = 8.0
    expected = np.diag([-2.0, 1.0, 1.0]) / r3
    assert np.allclose(H[:3, 3:], expected, atol=1e-15)


# ---------------------------------------------------------------------------
# inertia, residual, normalization


def test_moments_of_inertia():
    cfg = euler_on_axis(0, 2)
    assert moment_of_inertia(cfg) == pytest.approx(1.0, rel=1e-14)
    spec = Spectrum((3.0, 1.0))
    assert moment_of_inertia_s(cfg, spec) == pytest.approx(3.0, rel=1e-14)
    on_e2 = euler_on_axis(1, 2)
    assert moment_of_inertia_s(on_e2, spec) == pytest.approx(1.0, rel=1e-14)


def test_weight_vector_layout():
    cfg = Configuration(np.zeros((2, 3)) + [[0.0, 0, 0], [1.0, 0, 0]], np.array([2.0, 5.0]))
    spec = Spectrum((4.0, 3.0, 1.0))
    w = weight_vector(cfg, spec)
    assert np.allclose(w, [8.0, 6.0, 2.0, 20.0, 15.0, 5.0])


def test_residual_vanishes_at_equilateral_for_identity_weights():
    for masses in [(1.0, 1.0, 1.0), (1.0, 2.0, 3.0)]:
        cfg = normalize(equilateral(masses), Spectrum.identity(2))
        G, lam = sbc_residual(cfg, Spectrum.identity(2))
        u = potential(cfg)
        assert np.linalg.norm(G) < 1e-13 * u
        assert lam == pytest.approx(u, rel=1e-12)


def test_residual_vanishes_for_rescaled_collinear_family():
    # a collinear central configuration on axis j, shrunk by 1/sqrt(s_j),
    # balances the weighted equation exactly
    s1 = 2.0
    spec = Spectrum((s1, 1.0), h1_mode=True)
    on_e1 = euler_on_axis(0, 2, scale=1.0 / math.sqrt(s1))
    assert residual_norm(on_e1, spec) < 1e-13 * potential(on_e1)
    assert moment_of_inertia_s(on_e1, spec) == pytest.approx(1.0, rel=1e-13)
    on_e2 = euler_on_axis(1, 2)
    assert residual_norm(on_e2, spec) < 1e-13 * potential(on_e2)


def test_normalize_puts_config_on_weighted_sphere():
    rng = np.random.default_rng(5)
    cfg = random_configuration(rng, 3, 2)
    spec = Spectrum((2.5, 1.0))
    out = normalize(cfg, spec)
    assert moment_of_inertia_s(out, spec) == pytest.approx(1.0, rel=1e-14)


# ---------------------------------------------------------------------------
# tangent basis and restricted second variation


@pytest.mark.parametrize("n,d", [(3, 2), (4, 2), (3, 3), (5, 3)])
def test_tangent_basis_properties(n, d):
    rng = np.random.default_rng(10 * n + d)
    cfg = random_configuration(rng, n, d)
    spec = Spectrum(tuple(sorted(1.0 + rng.random(d), reverse=True)))
    V = tangent_basis(cfg, spec)
    k = d * (n - 1) - 1
    assert V.shape == (n * d, k)
    w = weight_vector(cfg, spec)
    gram = V.T @ (w[:, None] * V)
    assert np.allclose(gram, np.eye(k), atol=1e-10)
    cols = V.T.reshape(k, n, d)
    # translation-free and tangent to the weighted sphere
    assert np.max(np.abs(np.einsum("i,cik->ck", cfg.masses, cols))) < 1e-10
    radial = (w * cfg.q.ravel()) @ V
    assert np.max(np.abs(radial)) < 1e-10


def test_restricted_hessian_requires_criticality():
    rng = np.random.default_rng(6)
    cfg = random_configuration(rng, 3, 2)
    with pytest.raises(NotCriticalError):
        restricted_hessian(cfg, Spectrum.identity(2))


def test_equilateral_inertia_triple():
    cfg = normalize(equilateral(), Spectrum.identity(2))
    triple = inertia_indices(cfg, Spectrum.identity(2))
    assert tuple(triple) == (0, 1, 2)
    assert triple.index + triple.nullity + triple.coindex == 2 * (3 - 1) - 1


@pytest.mark.parametrize(
    "d,expected",
    [(2, (1, 1, 1)), (3, (2, 2, 1))],
)
def test_collinear_central_inertia_triple(d, expected):
    # (index, nullity, coindex) = ((d-1)(n-2), d-1, n-2) for a collinear
    # central configuration viewed with identity weights
    cfg = euler_on_axis(0, d)
    assert tuple(inertia_indices(cfg, Spectrum.identity(d))) == expected


@pytest.mark.parametrize(
    "s,axis,expected",
    [
        ((2.0, 1.0), 0, (2, 0, 1)),   # axis-1 family: ((d-1)(n-1), 0, n-2)
        ((2.0, 1.0), 1, (1, 0, 2)),   # below the n=3 threshold 12/5
        ((3.0, 1.0), 1, (0, 0, 3)),   # above it: a local minimum
        ((2.0, 1.5, 1.0), 0, (4, 0, 1)),
    ],
)
def test_weighted_collinear_inertia_triples(s, axis, expected):
    spec = Spectrum(s, h1_mode=True)
    cfg = euler_on_axis(axis, len(s), scale=1.0 / math.sqrt(s[axis]))
    assert tuple(inertia_indices(cfg, spec)) == expected


def test_ambient_form_reproduces_restricted_inertia():
    from scipy.linalg import eigh

    spec = Spectrum((2.0, 1.0), h1_mode=True)
    cfg = euler_on_axis(1, 2)
    A = restricted_hessian(cfg, spec)
    ev_restricted = np.sort(np.linalg.eigvalsh(A))

    H = ambient_balance_hessian(cfg, spec)
    V = tangent_basis(cfg, spec)
    w = weight_vector(cfg, spec)
    ev_ambient = np.sort(eigh(V.T @ H @ V, V.T @ (w[:, None] * V), eigvals_only=True))
    assert np.allclose(ev_restricted, ev_ambient, atol=1e-10)


# ---------------------------------------------------------------------------
# serialization


def test_document_round_trip():
    rng = np.random.default_rng(9)
    cfg = random_configuration(rng, 4, 3)
    spec = Spectrum((2.0, 1.5, 1.0), h1_mode=True)
    doc = to_document(cfg, spec)
    back_cfg, back_spec = from_document(doc)
    assert np.array_equal(back_cfg.q, cfg.q)
    assert np.array_equal(back_cfg.masses, cfg.masses)
    assert back_spec.s == spec.s
    assert back_spec.h1_mode


def test_document_validation():
    cfg = Configuration(np.array([[0.0, 0.0], [1.0, 0.0]]), np.ones(2))
    doc = to_document(cfg, Spectrum.identity(2))
    bad = dict(doc)
    bad["masses"] = [1.0]
    with pytest.raises(ValueError):
        from_document(bad)
    missing = {k: v for k, v in doc.items() if k != "S"}
    with pytest.raises(ValueError):
        from_document(missing)


def test_min_separation_reports_distance_to_collision_set():
    cfg = Configuration(np.array([[0.0, 0.0], [0.25, 0.0], [2.0, 0.0]]), np.ones(3))
    assert min_separation(cfg) == pytest.approx(0.25, rel=1e-15)
