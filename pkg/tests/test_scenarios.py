import numpy as np
import pytest

from lpswe import mesh as meshmod
from lpswe.exceptions import ConfigError
from lpswe.fields import Params
from lpswe.scenarios import (REGISTRY, bump_topography, dam_break,
                             error_norms, get_scenario, lake_at_rest,
                             line_cut, vortex_exact,
                             vortex_gaussian_topography, _vortex_k)


def test_bump_values():
    # plateau and tails
    assert bump_topography(0.5) == pytest.approx(0.3)
    assert bump_topography(0.0) == 0.0
    assert bump_topography(1.0) == 0.0
    assert bump_topography(0.325) == 0.0
    # hand value on the rising branch: 0.3 * 0.5 * exp(2 - 0.1/0.025)
    assert bump_topography(0.35) == pytest.approx(0.15 * np.exp(-2.0),
                                                  rel=1e-12)


def test_bump_continuity():
    # the branch joins are continuous to high accuracy
    for x0 in (0.375, 0.425, 0.575, 0.625):
        lo = bump_topography(x0 - 1e-9)
        hi = bump_topography(x0 + 1e-9)
        assert lo == pytest.approx(hi, abs=1e-6)


def test_bump_vectorized_matches_scalar():
    xs = np.linspace(0.0, 1.0, 97)
    zv = bump_topography(xs)
    assert zv.shape == xs.shape
    for x, z in zip(xs[::7], zv[::7]):
        assert bump_topography(float(x)) == z


def test_gaussian_topography_values():
    assert vortex_gaussian_topography(1.0, 0.5) == pytest.approx(10.0)
    assert vortex_gaussian_topography(0.0, 0.5) == pytest.approx(
        10.0 * np.exp(-5.0))
    assert vortex_gaussian_topography(1.0, 0.0) == pytest.approx(
        10.0 * np.exp(-12.5))


def test_lake_at_rest_surface():
    z = np.array([0.0, 0.2, 0.3])
    c = lake_at_rest(0.5, z)
    assert np.allclose(c.h + z, 0.5)
    assert np.all(c.hu == 0.0)
    with pytest.raises(ConfigError):
        lake_at_rest(0.25, z)


def test_dam_break_states():
    xc = np.array([0.25, 0.5, 0.75])
    c = dam_break(xc, np.zeros(3))
    assert np.array_equal(c.h, [0.5, 0.5, 1.0])


def test_vortex_k_values():
    assert _vortex_k(0.0) == pytest.approx(2.0 + 0.125)
    assert _vortex_k(np.pi) == pytest.approx(-1.875 + 0.75 * np.pi ** 2)


def test_vortex_center_depth():
    # center depth: 110 + (15^2/(9.81*(4pi)^2)) * (k(0) - k(pi))
    p = Params()
    h, u, v = vortex_exact(0.5, 0.5, 0.0, p)
    amp = 225.0 / (9.81 * 16.0 * np.pi ** 2)
    expected = 110.0 + amp * (2.125 - (-1.875 + 0.75 * np.pi ** 2))
    assert h[0] == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(109.5058, abs=5e-4)
    # the swirl vanishes at the very center
    assert u[0] == pytest.approx(0.6)
    assert v[0] == pytest.approx(0.0)


def test_vortex_outside_core_is_background():
    p = Params()
    h, u, v = vortex_exact(0.9, 0.9, 0.0, p)
    assert h[0] == 110.0
    assert u[0] == 0.6
    assert v[0] == 0.0


def test_vortex_continuous_at_core_edge():
    p = Params()
    r_edge = np.pi / (4.0 * np.pi)  # omega r = pi
    for eps in (-1e-10, 1e-10):
        h, u, v = vortex_exact(0.5 + r_edge + eps, 0.5, 0.0, p)
        assert h[0] == pytest.approx(110.0, abs=1e-8)
        assert v[0] == pytest.approx(0.0, abs=1e-7)


def test_vortex_advection_periodic_wrap():
    p = Params()
    h0, u0, v0 = vortex_exact(0.5, 0.5, 0.0, p)
    # after one period 5/3 the pattern returns (0.6 * 5/3 = 1)
    h1, u1, v1 = vortex_exact(0.5, 0.5, 5.0 / 3.0, p)
    assert h1[0] == pytest.approx(h0[0], rel=1e-12)
    # at half a domain crossing the center has moved to x = 0.75...
    h2, _, _ = vortex_exact(0.75, 0.5, 0.25 / 0.6, p)
    assert h2[0] == pytest.approx(h0[0], rel=1e-12)


def test_error_norms_basic():
    areas = np.array([0.5, 0.5])
    linf, l1, l2 = error_norms([1.0, 2.0], [0.0, 0.0], areas)
    assert linf == 2.0
    assert l1 == pytest.approx(1.5)
    assert l2 == pytest.approx(np.sqrt(2.5))
    with pytest.raises(ValueError):
        error_norms([1.0], [1.0, 2.0], areas)


def test_line_cut_selects_row():
    m = meshmod.build_cartesian(4, 4)
    vals = m.centroid[:, 0] + 10.0 * m.centroid[:, 1]
    x, v = line_cut(vals, m, 0.6)
    assert len(x) == 4
    assert np.all(np.diff(x) > 0.0)
    # nearest row to y=0.6 is the row of centroids at y=0.625
    assert np.allclose(v - x, 6.25)


def test_registry_contents():
    assert set(REGISTRY) == {"lake_at_rest", "dam_break", "vortex_flat",
                             "vortex_topo"}
    assert get_scenario("vortex_topo").domain == (0.0, 2.0, 0.0, 1.0)
    with pytest.raises(ConfigError):
        get_scenario("tsunami")


def test_scenario_build_shapes():
    p = Params()
    sc = get_scenario("dam_break")
    mesh = meshmod.build_triangulated(4, 4, sc.domain)
    topo, ic = sc.build(mesh, p)
    assert len(topo.z) == mesh.n_cells
    assert ic.h.shape == (mesh.n_cells,)
    assert ic.hu.shape == (mesh.n_cells, 2)
