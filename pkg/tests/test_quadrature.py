import math

import numpy as np
import pytest

from bvpdn import kernel, quadrature
from bvpdn.quadrature import PolarGrid, QuadConfig, integrate_circle, integrate_disk


@pytest.mark.parametrize(
    "kwargs", [{"n_theta": 511}, {"n_theta": 0}, {"n_r": 0}, {"adaptive_tol": 0.0}, {"max_depth": 0}, {"exclusion_radius": -1.0}]
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        QuadConfig(**kwargs)


def test_config_defaults():
    c = QuadConfig()
    assert c.as_dict() == {"n_theta": 512, "n_r": 64, "adaptive_tol": 1e-8, "max_depth": 12, "exclusion_radius": 1e-3}


def test_circle_constant_and_frequency():
    assert integrate_circle(lambda t: np.ones_like(t), 16) == pytest.approx(1.0, abs=1e-15)
    assert abs(integrate_circle(lambda t: np.exp(1j * t), 16)) < 1e-15


def test_circle_poisson_mean():
    val = integrate_circle(lambda t: kernel.poisson(0.5, t), 512)
    assert abs(val - 1.0) <= 1e-12


def test_circle_trailing_axes():
    out = integrate_circle(lambda t: np.stack([np.ones_like(t), np.cos(t) ** 2], axis=-1), 32)
    assert np.allclose(out, [1.0, 0.5], atol=1e-15)


def test_circle_nonfinite_names_node():
    def f(t):
        v = np.ones_like(t)
        v[3] = np.nan
        return v

    with pytest.raises(FloatingPointError, match="node 3"):
        integrate_circle(f, 8)


def test_circle_shape_mismatch():
    with pytest.raises(ValueError):
        integrate_circle(lambda t: np.ones(3), 8)


def test_polar_grid_weights():
    grid = PolarGrid.build(16, 32)
    assert np.all(grid.weights > 0)
    assert grid.weights.sum() == pytest.approx(math.pi, abs=1e-12)
    assert grid.points.shape == (16, 32)


def test_radial_rule_exactness():
    x, w = quadrature.gauss_legendre_unit(4)
    for k in range(8):
        assert abs(np.sum(w * x**k) - 1.0 / (k + 1)) <= 1e-13


def test_disk_area_and_second_moment():
    assert abs(integrate_disk(lambda z: np.ones_like(z)).value - math.pi) <= 1e-12
    assert abs(integrate_disk(lambda z: np.abs(z) ** 2).value - math.pi / 2) <= 1e-12


def test_disk_positivity():
    val = integrate_disk(lambda z: 1.0 + np.abs(z) ** 4 + 0j, singular_at=0.3 - 0.2j).value
    assert val.real > 0


def test_disk_h2_center_integral():
    res = integrate_disk(lambda z: kernel.h2(0.0, z), singular_at=0.0)
    assert abs(res.value + 3 * math.pi / 4) <= 1e-8
    assert res.method == "centered-polar"
    assert res.warning is None


def test_centered_rule_integrates_smooth_functions():
    for c in (0.0, 0.6 + 0.3j, -0.95j):
        nodes, w = quadrature.centered_polar_rule(c, 64, 256, 1e-3)
        assert np.all(w > 0)
        assert np.all(np.abs(nodes) <= 1 + 1e-12)
        assert abs(w.sum() - math.pi) <= 1e-12
        assert abs(np.sum(w * np.abs(nodes) ** 2) - math.pi / 2) <= 1e-12


def test_singular_integral_matches_mobius_substitution():
    """Cross-check against the disk automorphism that moves the singularity to 0."""
    z = 0.55 - 0.35j
    g = lambda zeta: 1.0 + zeta**2 * np.conj(zeta)  # noqa: E731
    direct = integrate_disk(lambda zeta: kernel.h2(z, zeta) * g(zeta), singular_at=z).value

    def pulled_back(eta):
        zeta = (z - eta) / (1 - np.conj(z) * eta)
        jac = (1 - abs(z) ** 2) ** 2 / np.abs(1 - np.conj(z) * eta) ** 4
        return kernel.h2(z, zeta) * g(zeta) * jac

    nodes, w = quadrature.centered_polar_rule(0.0, 128, 512, 1e-4)
    mobius = np.sum(pulled_back(nodes) * w)
    assert abs(direct - mobius) <= 1e-9


def test_refinement_stays_within_estimate():
    z = 0.4 + 0.4j
    f = lambda zeta: kernel.h2(z, zeta) * (1 + zeta)  # noqa: E731
    coarse = integrate_disk(f, QuadConfig(n_r=32, n_theta=256), singular_at=z)
    fine = integrate_disk(f, QuadConfig(n_r=64, n_theta=512), singular_at=z)
    assert abs(fine.value - coarse.value) <= max(coarse.error_estimate, 1e-12)


def test_warning_when_depth_exhausted():
    # a discontinuous integrand cannot meet a tiny tolerance in one refinement
    cfg = QuadConfig(n_r=8, n_theta=16, adaptive_tol=1e-15, max_depth=1)
    res = integrate_disk(lambda z: (z.real > 0.1).astype(float) + 0j, cfg, singular_at=0.2)
    assert res.depth == 1
    assert res.warning is not None and "depth" in res.warning
    assert res.metadata["warning"] == res.warning


def test_disk_nonfinite_sample_raises():
    with pytest.raises(FloatingPointError):
        integrate_disk(lambda z: np.full_like(z, np.nan), singular_at=0.1)


def test_weighted_interface_matches_plain():
    f = lambda z: np.exp(z)  # noqa: E731
    plain = integrate_disk(f, singular_at=0.3)
    fused = quadrature.integrate_disk_weighted(lambda n, w: np.sum(f(n) * w), singular_at=0.3)
    assert plain.value == fused.value
