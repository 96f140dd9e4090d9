import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from locklab import kinematics as kin
from locklab.errors import DomainError

from conftest import random_rotation


def test_identity_invariants():
    inv = kin.invariants(np.eye(3))
    assert (inv.I1, inv.I2, inv.I3, inv.J, inv.I1bar, inv.I2bar) == (3.0, 3.0, 1.0, 1.0, 3.0, 3.0)


def test_simple_shear_invariants():
    inv = kin.invariants(kin.simple_shear(1.0))
    assert inv.J == pytest.approx(1.0)
    assert inv.I1bar == pytest.approx(4.0)


def test_uniaxial_invariants():
    inv = kin.invariants(np.diag([2.0, 2**-0.5, 2**-0.5]))
    assert inv.J == pytest.approx(1.0)
    assert inv.I1bar == pytest.approx(5.0)


@pytest.mark.parametrize("F", [np.diag([1.0, 1.0, -1.0]), np.zeros((3, 3)), np.diag([1.0, 1.0, 1e-13])])
def test_non_positive_determinant_rejected(F):
    with pytest.raises(DomainError):
        kin.invariants(F)


def test_defgrad_is_immutable():
    d = kin.DefGrad(np.eye(3))
    with pytest.raises(ValueError):
        d.F[0, 0] = 2.0


def test_defgrad_embeds_plane_gradient():
    d = kin.DefGrad(np.array([[2.0, 0.3], [0.0, 0.5]]))
    assert d.F.shape == (3, 3)
    assert d.F[2, 2] == 1.0
    assert d.J == pytest.approx(1.0)


def test_deviatoric_examples():
    assert_allclose(kin.deviatoric(np.eye(3)), np.zeros((3, 3)), atol=1e-15)
    assert_allclose(kin.deviatoric(np.diag([1.0, 2.0, 3.0])), np.diag([-1.0, 0.0, 1.0]))
    Bb = kin.invariants(kin.simple_shear(0.7)).Bbar
    assert abs(np.trace(kin.deviatoric(Bb))) < 1e-15


def test_polar_stretch_examples():
    s, _ = kin.polar_stretch_eigen(np.eye(3))
    assert_allclose(s, [1.0, 1.0, 1.0])
    s, axes = kin.polar_stretch_eigen(np.diag([2.0, 0.5, 1.0]))
    assert_allclose(s, [2.0, 1.0, 0.5])
    assert_allclose(np.abs(axes), np.eye(3)[:, [0, 2, 1]], atol=1e-15)
    s, _ = kin.polar_stretch_eigen(kin.simple_shear(1.0))
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    assert s[0] == pytest.approx(golden)
    assert s[0] * s[2] == pytest.approx(1.0)
    assert np.prod(s) == pytest.approx(1.0)


def test_polar_stretch_deterministic_signs(rng):
    F = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
    s1, v1 = kin.polar_stretch_eigen(F)
    s2, v2 = kin.polar_stretch_eigen(F.copy())
    assert_allclose(v1, v2)
    assert np.all(np.diff(s1) <= 0)
    assert_allclose(v1 @ np.diag(s1**2) @ v1.T, F.T @ F, rtol=1e-12, atol=1e-12)


def test_log_strain_of_stretch():
    L = kin.log_strain(np.diag([np.e, 1.0, 1.0 / np.e]))
    assert_allclose(L, np.diag([1.0, 0.0, -1.0]), atol=1e-14)


def _random_F(rng, n):
    out = []
    while len(out) < n:
        F = rng.uniform(-1.5, 1.5, (3, 3)) + np.eye(3)
        J = np.linalg.det(F)
        if 0.1 < J < 10.0:
            out.append(F)
    return out


def test_invariants_random_bulk(rng):
    for F in _random_F(rng, 10_000):
        inv = kin.invariants(F)
        assert abs(inv.I3 - inv.J**2) <= 1e-12 * inv.J**2
        assert inv.I1bar >= 3.0 - 1e-12


def test_isochoric_objectivity_bulk(rng):
    for F in _random_F(rng, 2000):
        Q = random_rotation(rng)
        a = kin.invariants(F)
        b = kin.invariants(Q @ F)
        assert b.I1bar == pytest.approx(a.I1bar, rel=1e-10)
        assert b.I2bar == pytest.approx(a.I2bar, rel=1e-10)


matrices = st.lists(st.floats(-0.8, 0.8), min_size=9, max_size=9).map(lambda v: np.eye(3) + np.reshape(v, (3, 3)))


@given(matrices, st.floats(0.2, 5.0))
def test_volumetric_scaling_invariance(F, c):
    if np.linalg.det(F) < 0.05:
        return
    a = kin.invariants(F)
    b = kin.invariants(c * F)
    assert b.I1bar == pytest.approx(a.I1bar, rel=1e-12)
    assert b.I2bar == pytest.approx(a.I2bar, rel=1e-12)
    assert b.J == pytest.approx(c**3 * a.J, rel=1e-12)


@given(matrices)
def test_isochoric_invariants_bounded_below(F):
    if np.linalg.det(F) < 0.05:
        return
    inv = kin.invariants(F)
    assert inv.I1bar >= 3.0 - 1e-12
    assert inv.I2bar >= 3.0 - 1e-12
    if np.allclose(inv.Bbar, np.eye(3), atol=1e-8):
        assert inv.I1bar == pytest.approx(3.0)


def test_unit_determinant_matches_plain_invariants():
    inv = kin.invariants(kin.simple_shear(0.9))
    assert inv.I1bar == pytest.approx(inv.I1)
    assert inv.I2bar == pytest.approx(inv.I2)
