"""Tests for the birefringence path models."""

import numpy as np
import pytest

from berryring import (
    DiameterPath,
    DomainError,
    FermiStepPerturbation,
    HalfCirclePath,
    InvalidArgumentError,
    RingParams,
    RingPath,
    StraightLinePath,
    TabulatedPath,
    kappa_at,
    standard_ring,
)


def test_half_circle_midpoint():
    path = HalfCirclePath(lam=1.022, gamma=1.0)
    sample = path.kappa_at(0.0)
    np.testing.assert_allclose(sample.kappa, [1.022, 0.0, 0.0], atol=1e-15)
    assert sample.k0 == 0.0


def test_half_circle_constant_radius():
    path = HalfCirclePath(lam=2.5, gamma=1.3)
    lo, hi = path.domain
    assert lo == pytest.approx(-2.5 / 1.3)
    assert hi == pytest.approx(2.5 / 1.3)
    s = np.linspace(lo, hi, 501)
    _, kap = path.sample(s)
    np.testing.assert_allclose(np.linalg.norm(kap, axis=1), 1.3 * 2.5, atol=1e-12)


def test_half_circle_endpoints_on_axis():
    path = HalfCirclePath(lam=1.022, gamma=1.0)
    lo, hi = path.domain
    np.testing.assert_allclose(path.kappa_at(lo).kappa, [0, 0, -1.022], atol=1e-9)
    np.testing.assert_allclose(path.kappa_at(hi).kappa, [0, 0, 1.022], atol=1e-9)


def test_half_circle_domain_checked():
    path = HalfCirclePath(lam=1.0, gamma=1.0)
    with pytest.raises(DomainError):
        path.kappa_at(1.5)
    with pytest.raises(DomainError):
        path.sample(np.array([0.0, -1.2]))


def test_half_circle_rejects_negative_lambda():
    with pytest.raises(InvalidArgumentError):
        HalfCirclePath(lam=-1.0)


def test_straight_line_components():
    path = StraightLinePath(delta=0.4, gamma=2.0)
    s = np.linspace(*path.domain, 401)
    _, kap = path.sample(s)
    np.testing.assert_allclose(kap[:, 0], 0.0, atol=1e-15)
    np.testing.assert_allclose(kap[:, 1], 0.4, atol=1e-15)
    np.testing.assert_allclose(kap[:, 2], 0.4 * 2.0 * s, atol=1e-13)
    mags = np.linalg.norm(kap, axis=1)
    assert mags.min() == pytest.approx(0.4, abs=1e-12)
    assert abs(s[np.argmin(mags)]) < 1e-9


def test_diameter_crosses_origin():
    path = DiameterPath()
    np.testing.assert_allclose(path.kappa_at(0.0).kappa, [0, 0, 0], atol=1e-15)
    lo, hi = path.domain
    assert np.linalg.norm(path.kappa_at(lo).kappa) == pytest.approx(1.022)
    assert np.linalg.norm(path.kappa_at(hi).kappa) == pytest.approx(1.022)


def test_fermi_step_flat_top_and_edge():
    pert = FermiStepPerturbation(alpha=0.2, a_sharp=50.0, b_width=0.6, beta=5.0)
    # at s = beta*B/gamma the exponent vanishes and the window is at half height
    assert pert.value(3.0) == pytest.approx(0.1, abs=1e-12)
    assert pert.value(0.0) == pytest.approx(0.2, abs=0.2 * np.exp(-50 * 0.36))
    s = np.linspace(-5.0, 5.0, 2001)
    assert np.all(np.abs(pert.value(s)) <= 0.2 + 1e-15)


def test_standard_ring_min_kappa_unperturbed():
    ring = standard_ring(alpha=0.0)
    s = np.linspace(*ring.domain, 20001)
    _, kap = ring.sample(s)
    assert np.linalg.norm(kap, axis=1).min() < 1e-3


def test_standard_ring_min_kappa_perturbed():
    ring = standard_ring(alpha=0.2)
    # dense sampling over the diameter leg only
    s = np.linspace(2 * 1.022, ring.length, 200001)
    _, kap = ring.sample(s)
    assert np.linalg.norm(kap, axis=1).min() == pytest.approx(0.2, abs=1e-6)


def test_standard_ring_length():
    ring = standard_ring(alpha=0.1)
    assert ring.length == pytest.approx(2 * 1.022 + 2 * 5.0, abs=1e-12)
    assert ring.length == pytest.approx(12.044)


def test_standard_ring_closure():
    ring = standard_ring(alpha=0.3)
    lo, hi = ring.domain
    np.testing.assert_allclose(
        ring.kappa_at(lo).kappa, ring.kappa_at(hi).kappa, atol=1e-9
    )


def test_standard_ring_custom_params():
    params = RingParams(lambda1=2.0, beta=4.0, gamma=1.0)
    ring = standard_ring(alpha=0.1, params=params)
    assert ring.length == pytest.approx(2 * 2.0 + 2 * 4.0)


def test_ring_path_rejects_junction_gap():
    half = HalfCirclePath(lam=1.0, gamma=1.0)
    other = HalfCirclePath(lam=1.5, gamma=1.0)
    with pytest.raises(InvalidArgumentError):
        RingPath(segments=(half, other))


def test_ring_path_sampling_matches_pointwise():
    ring = standard_ring(alpha=0.15)
    s = np.linspace(*ring.domain, 97)
    k0s, kap = ring.sample(s)
    for i, si in enumerate(s):
        sample = ring.kappa_at(float(si))
        np.testing.assert_allclose(kap[i], sample.kappa, atol=1e-12)
        assert k0s[i] == pytest.approx(sample.k0)


def test_free_function_kappa_at():
    path = HalfCirclePath(lam=1.0)
    sample = kappa_at(path, 0.0)
    np.testing.assert_allclose(sample.kappa, [1.0, 0.0, 0.0], atol=1e-15)


def test_tabulated_path_linear_interpolation():
    s_nodes = np.array([0.0, 1.0, 2.0])
    kappa_nodes = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
    path = TabulatedPath(s_nodes=s_nodes, kappa_nodes=kappa_nodes)
    np.testing.assert_allclose(path.kappa_at(0.5).kappa, [0.5, 0.0, 0.5], atol=1e-15)
    np.testing.assert_allclose(path.kappa_at(2.0).kappa, [0.0, 0.0, -1.0], atol=1e-15)
    assert path.length == pytest.approx(2.0)


def test_sample_values_finite_and_shapes():
    ring = standard_ring(alpha=0.05)
    s = np.linspace(*ring.domain, 301)
    k0s, kap = ring.sample(s)
    assert k0s.shape == (301,)
    assert kap.shape == (301, 3)
    assert np.all(np.isfinite(k0s))
    assert np.all(np.isfinite(kap))
