import numpy as np
import pytest

from lpswe.fields import Params
from lpswe.flux_kernels import (FaceState, face_flux, hydrostatic_source,
                                impedance, interface_pressures,
                                interface_velocity, theta_policy)


def test_impedance_hand_value():
    # kappa * max(h c) with g = 1: max(1*1, 4*2) = 8, times 1.01
    p = Params(g=1.0)
    assert impedance(1.0, 4.0, p) == pytest.approx(8.08, rel=1e-14)


def test_impedance_symmetry_and_subcharacteristic():
    p = Params()
    rng = np.random.default_rng(3)
    hl = rng.uniform(0.1, 5.0, 50)
    hr = rng.uniform(0.1, 5.0, 50)
    a = impedance(hl, hr, p)
    assert np.array_equal(a, impedance(hr, hl, p))
    assert np.all(a > hl * np.sqrt(p.g * hl))
    assert np.all(a > hr * np.sqrt(p.g * hr))


def test_impedance_rejects_dry():
    with pytest.raises(ValueError):
        impedance(0.0, 1.0, Params())


def test_hydrostatic_source_antisymmetric():
    s = hydrostatic_source(1.0, 3.0, 0.2, 0.7, 9.81)
    assert s == pytest.approx(9.81 * 2.0 * 0.5)
    # a consistent swap flips the sign exactly
    assert hydrostatic_source(3.0, 1.0, 0.7, 0.2, 9.81) == -s


def test_hydrostatic_source_flat_bottom_zero():
    assert hydrostatic_source(1.0, 2.0, 0.3, 0.3, 9.81) == 0.0


def test_interface_velocity_symmetric_rest():
    # at rest with equal pressures and no source the interface is still
    assert interface_velocity(0.0, 0.0, 5.0, 5.0, 8.0, 0.0) == 0.0


def test_interface_velocity_lake_at_rest_cancellation():
    # lake at rest: Pi = g h^2/2 with h = H - z; the pressure jump must
    # cancel the source bracket exactly
    g, H = 9.81, 0.5
    zl, zr = 0.1, 0.3
    hl, hr = H - zl, H - zr
    src = hydrostatic_source(hl, hr, zl, zr, g)
    pil, pir = g * hl * hl / 2.0, g * hr * hr / 2.0
    u = interface_velocity(0.0, 0.0, pil, pir, 8.0, src)
    assert abs(u) < 1e-16


def test_theta_policy_bounds():
    p = Params()
    th = theta_policy(np.array([0.0, 0.1, 100.0]), 1.0, 1.0, p)
    c = np.sqrt(9.81)
    assert th[0] == 0.0
    assert th[1] == pytest.approx(0.1 / c)
    assert th[2] == 1.0


def test_theta_policy_unity():
    p = Params(theta_policy="unity")
    th = theta_policy(np.array([0.0, 5.0]), 1.0, 1.0, p)
    assert np.array_equal(th, [1.0, 1.0])


def test_interface_pressures_hand_value():
    # zero velocity jump: pi_c = (0.45+0.8)/2 = 0.625; src = -0.35 shifts
    # the two sides to 0.45 and 0.8
    pl, pr = interface_pressures(0.45, 0.8, 0.0, 0.0, 8.0, 1.0, -0.35)
    assert pl == pytest.approx(0.45)
    assert pr == pytest.approx(0.8)


def test_interface_pressures_jump_dissipation():
    # velocity jump adds -theta*a*(du)/2 to both sides
    pl, pr = interface_pressures(1.0, 1.0, 0.0, 0.5, 4.0, 0.5, 0.0)
    assert pl == pytest.approx(1.0 - 0.5 * 4.0 * 0.5 / 2.0)
    assert pl == pr


def test_face_flux_rotational_invariance():
    # evaluating in a rotated frame with rotated velocities gives identical
    # interface quantities
    p = Params()
    rng = np.random.default_rng(11)
    for _ in range(20):
        ang = rng.uniform(0, 2 * np.pi)
        n0 = np.array([1.0, 0.0])
        R = np.array([[np.cos(ang), -np.sin(ang)],
                      [np.sin(ang), np.cos(ang)]])
        uL = rng.normal(size=2)
        uR = rng.normal(size=2)
        hL, hR = rng.uniform(0.5, 2.0, 2)
        piL, piR = rng.uniform(1.0, 5.0, 2)
        zL, zR = rng.uniform(0.0, 0.3, 2)
        sL = FaceState(hL, uL, piL, zL)
        sR = FaceState(hR, uR, piR, zR)
        f0 = face_flux(sL, sR, sL, sR, n0, p)
        sLr = FaceState(hL, R @ uL, piL, zL)
        sRr = FaceState(hR, R @ uR, piR, zR)
        fr = face_flux(sLr, sRr, sLr, sRr, R @ n0, p)
        assert f0.u_star == pytest.approx(fr.u_star, abs=1e-13)
        assert f0.pi_star_L == pytest.approx(fr.pi_star_L, abs=1e-12)
        assert f0.pi_star_R == pytest.approx(fr.pi_star_R, abs=1e-12)


def test_face_flux_galilean_consistency_at_rest():
    # equal states, no topography jump: u_star is the common normal speed
    # and the interface pressures equal the common pressure
    p = Params()
    s = FaceState(2.0, np.array([0.7, -0.2]), 19.62, 0.1)
    f = face_flux(s, s, s, s, np.array([0.0, 1.0]), p)
    assert f.u_star == pytest.approx(-0.2)
    assert f.pi_star_L == pytest.approx(19.62)
    assert f.pi_star_R == pytest.approx(19.62)
