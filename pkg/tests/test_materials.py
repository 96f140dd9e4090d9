import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from locklab import kinematics as kin
from locklab.errors import EvaluationError, LockingViolation, ParameterError, SingularTangentError, DomainError
from locklab.materials import (
    LockingMode,
    MaterialModel,
    ModelKind,
    cauchy_stress_general,
    deviatoric_kirchhoff,
    energy,
    energy_invariants,
    isochoric_pk1_tangent,
    locking_limit,
    neo_hookean_limit_check,
    tangent_tensor,
)

from conftest import random_isochoric, random_rotation

NH = MaterialModel.neo_hookean()
GENT5 = MaterialModel.gent(5.0)
KILIAN5 = MaterialModel.kilian(5.0)
KILIAN3 = MaterialModel.kilian(3.0)
KILIAN_FULL = MaterialModel.kilian(5.0, alpha=0.2, f=0.3)
ALL = [NH, GENT5, KILIAN5, KILIAN3]


# parameters


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="kilian", a=1.5),
        dict(kind="kilian", a=5.0, f=1.5),
        dict(kind="gent", a=-1.0),
        dict(kind="gent", a=5.0, alpha=0.1),
        dict(kind="neo-hookean", a=5.0),
        dict(kind="neo-hookean", mu0=0.0),
        dict(kind="gent"),
        dict(kind="rubber", a=1.0),
    ],
)
def test_invalid_parameters(kwargs):
    with pytest.raises(ParameterError):
        MaterialModel(**kwargs)


def test_locking_limits():
    assert locking_limit(GENT5) == ("I1bar", 8.0)
    assert locking_limit(KILIAN5) == ("Itilde", 25.0)
    assert locking_limit(NH)[1] == math.inf


# energy examples


def test_neo_hookean_natural_state():
    ev = energy_invariants(NH, 3.0)
    assert ev.W == 0.0
    assert ev.dW_dI1 == 0.5


def test_kilian_natural_state_singular_second_derivative():
    ev = energy_invariants(KILIAN5, 3.0)
    assert ev.W == 0.0
    assert ev.dW_dI1 == pytest.approx(0.5)
    assert ev.d2W_dI1I1 == math.inf


def test_gent_first_derivative_example():
    ev = energy_invariants(GENT5, 4.0)
    assert ev.dW_dI1 == pytest.approx(0.625, rel=1e-14)
    h = 1e-6
    fd = (energy_invariants(GENT5, 4.0 + h).W - energy_invariants(GENT5, 4.0 - h).W) / (2 * h)
    assert fd == pytest.approx(0.625, abs=1e-8)


def test_kilian_first_derivative_example():
    ev = energy_invariants(KILIAN3, 4.0)
    eta = 1.0 / math.sqrt(6.0)
    assert ev.dW_dI1 == pytest.approx(1.0 / (2.0 * (1.0 - eta)), rel=1e-14)
    assert ev.dW_dI1 == pytest.approx(0.845, abs=5e-4)
    h = 1e-6
    fd = (energy_invariants(KILIAN3, 4.0 + h).W - energy_invariants(KILIAN3, 4.0 - h).W) / (2 * h)
    assert fd == pytest.approx(ev.dW_dI1, rel=1e-8)


def test_kilian_closed_energy_value():
    # W = -mu0 (a^2 - 3) [ln(1 - eta) + eta] at I1bar = 4, a = 3
    eta = 1.0 / math.sqrt(6.0)
    ref = -6.0 * (math.log(1.0 - eta) + eta)
    assert energy_invariants(KILIAN3, 4.0).W == pytest.approx(ref, rel=1e-14)


def test_kilian_derivatives_match_factored_form():
    # the energy factorization and the derivative forms must agree
    for I1 in (3.5, 10.0, 24.0):
        ev = energy_invariants(KILIAN5, I1)
        eta = math.sqrt((I1 - 3.0) / 22.0)
        assert ev.dW_dI1 == pytest.approx(0.5 / (1.0 - eta), rel=1e-14)
        assert ev.d2W_dI1I1 == pytest.approx(1.0 / (4.0 * (1.0 - eta) ** 2 * eta * 22.0), rel=1e-13)


def test_interaction_and_mixing_terms_by_finite_differences():
    h = 1e-5
    for I1, I2 in ((4.0, 3.7), (9.0, 16.0), (12.0, 20.0)):
        ev = energy_invariants(KILIAN_FULL, I1, I2)
        d1 = (energy_invariants(KILIAN_FULL, I1 + h, I2).W - energy_invariants(KILIAN_FULL, I1 - h, I2).W) / (2 * h)
        d2 = (energy_invariants(KILIAN_FULL, I1, I2 + h).W - energy_invariants(KILIAN_FULL, I1, I2 - h).W) / (2 * h)
        assert d1 == pytest.approx(ev.dW_dI1, rel=1e-7)
        assert d2 == pytest.approx(ev.dW_dI2, rel=1e-7)
        dd = (energy_invariants(KILIAN_FULL, I1 + h, I2).dW_dI1 - energy_invariants(KILIAN_FULL, I1 - h, I2).dW_dI1) / (2 * h)
        assert dd == pytest.approx(ev.d2W_dI1I1, rel=1e-6)
        dx = (energy_invariants(KILIAN_FULL, I1, I2 + h).dW_dI1 - energy_invariants(KILIAN_FULL, I1, I2 - h).dW_dI1) / (2 * h)
        assert dx == pytest.approx(ev.d2W_dI1I2, rel=1e-6)


def test_interaction_term_sign():
    # positive alpha adds +(2/3) mu0 alpha ((It - 3)/2)^(3/2)
    base = energy_invariants(KILIAN5, 9.0).W
    m = MaterialModel.kilian(5.0, alpha=0.3)
    assert energy_invariants(m, 9.0).W - base == pytest.approx(2.0 / 3.0 * 0.3 * 3.0**1.5, rel=1e-12)


def test_mixing_weight_uses_combined_invariant():
    m = MaterialModel.kilian(5.0, f=0.4)
    ev = energy_invariants(m, 6.0, 8.0)
    assert ev.bound_value == pytest.approx(0.6 * 6.0 + 0.4 * 8.0)
    assert ev.W == pytest.approx(energy_invariants(KILIAN5, 0.6 * 6.0 + 0.4 * 8.0).W)


# outside the domain


def test_kilian_past_lock_keeps_raw_derivatives():
    ev = energy_invariants(KILIAN3, 12.0)
    assert not ev.in_domain and ev.locking_margin < 0
    assert math.isnan(ev.W)
    assert ev.dW_dI1 < 0
    eta = math.sqrt(9.0 / 6.0)
    assert ev.dW_dI1 == pytest.approx(0.5 / (1.0 - eta))


def test_gent_past_lock_and_pole():
    ev = energy_invariants(GENT5, 9.0)
    assert math.isnan(ev.W)
    assert ev.dW_dI1 == pytest.approx(0.5 * 5.0 / (5.0 - 6.0))
    with pytest.raises(EvaluationError):
        energy_invariants(GENT5, 8.0)


def test_guarded_stress_raises_with_margin():
    F = kin.simple_shear(3.0)  # I1bar = 12 > 8
    with pytest.raises(LockingViolation) as exc:
        cauchy_stress_general(GENT5, F)
    assert exc.value.margin == pytest.approx(-4.0)
    st_ = cauchy_stress_general(GENT5, F, mode=LockingMode.UNGUARDED)
    assert np.isfinite(st_.cauchy).all()


# stress examples


@pytest.mark.parametrize("model", ALL + [KILIAN_FULL])
def test_natural_state_is_stress_free(model):
    assert_allclose(cauchy_stress_general(model, np.eye(3)).cauchy, 0.0, atol=1e-15)


def test_neo_hookean_shear_stress():
    for g in (0.1, 1.0, 3.0):
        assert cauchy_stress_general(NH, kin.simple_shear(g)).cauchy[0, 1] == pytest.approx(g)


def test_gent_shear_stress_against_energy_derivative():
    # along simple shear dW/dgamma = sigma12
    h = 1e-6
    W = lambda g: energy(GENT5, kin.simple_shear(g)).W
    fd = (W(1.0 + h) - W(1.0 - h)) / (2 * h)
    s12 = cauchy_stress_general(GENT5, kin.simple_shear(1.0)).cauchy[0, 1]
    assert s12 == pytest.approx(1.25, rel=1e-14)
    assert fd == pytest.approx(s12, rel=1e-8)


def test_compressible_input_rejected():
    with pytest.raises(DomainError):
        cauchy_stress_general(NH, np.diag([1.1, 1.0, 1.0]))


def test_pressure_enters_as_hydrostatic_shift():
    F = kin.uniaxial(1.7)
    a = cauchy_stress_general(KILIAN5, F, 0.0).cauchy
    b = cauchy_stress_general(KILIAN5, F, 2.5).cauchy
    assert_allclose(a - b, 2.5 * np.eye(3), atol=1e-13)


# property tests


@pytest.mark.parametrize("model", ALL + [KILIAN_FULL])
def test_stress_properties_random(model, rng):
    _, limit = locking_limit(model)
    n = 0
    while n < 200:
        F = random_isochoric(rng, 0.35)
        ev = energy(model, F)
        if not ev.in_domain:
            continue
        n += 1
        p = rng.normal()
        s = cauchy_stress_general(model, F, p)
        inv = kin.invariants(F)
        dev = deviatoric_kirchhoff(model, inv, ev)
        assert abs(np.trace(dev)) <= 1e-10 * max(1.0, np.abs(dev).max())
        tau = s.kirchhoff
        scale = np.abs(tau).max()
        assert_allclose(tau, s.cauchy * inv.J, atol=1e-10 * scale)
        assert_allclose(tau, s.pk1 @ F.T, atol=1e-10 * scale)
        assert_allclose(tau, F @ s.pk2 @ F.T, atol=1e-10 * scale)
        Q = random_rotation(rng)
        r = cauchy_stress_general(model, Q @ F, p).cauchy
        assert_allclose(r, Q @ s.cauchy @ Q.T, atol=1e-10 * max(1.0, np.abs(s.cauchy).max()))
        if inv.I1bar > 3.0 + 1e-9:
            assert ev.W > 0


@pytest.mark.parametrize("model", [GENT5, KILIAN5, KILIAN3])
def test_monotone_stiffening_and_divergence(model):
    _, limit = locking_limit(model)
    grid = np.linspace(3.0, limit, 400)[:-1]
    d1 = [energy_invariants(model, I).dW_dI1 for I in grid]
    assert np.all(np.diff(d1) > 0)
    near = [energy_invariants(model, limit - 10.0**-k).dW_dI1 for k in range(1, 9)]
    assert np.all(np.diff(near) > 0)
    assert near[-1] > 1e3


@given(st.floats(3.05, 7.5))
def test_gent_derivative_consistency(I1):
    h = 1e-5
    ev = energy_invariants(GENT5, I1)
    fd = (energy_invariants(GENT5, I1 + h).W - energy_invariants(GENT5, I1 - h).W) / (2 * h)
    assert fd == pytest.approx(ev.dW_dI1, rel=1e-6)


@given(st.floats(3.05, 24.0))
def test_kilian_derivative_consistency(I1):
    h = 1e-5
    ev = energy_invariants(KILIAN5, I1)
    fd1 = (energy_invariants(KILIAN5, I1 + h).W - energy_invariants(KILIAN5, I1 - h).W) / (2 * h)
    fd2 = (energy_invariants(KILIAN5, I1 + h).dW_dI1 - energy_invariants(KILIAN5, I1 - h).dW_dI1) / (2 * h)
    assert fd1 == pytest.approx(ev.dW_dI1, rel=1e-6)
    assert fd2 == pytest.approx(ev.d2W_dI1I1, rel=1e-6)


@given(st.floats(2.0, 40.0), st.floats(-20.0, 60.0))
def test_domain_flag_matches_margin(a, I1):
    for m in (MaterialModel.gent(a), MaterialModel.kilian(a)):
        q = m.bounding_value(3.0 + abs(I1))
        if q == locking_limit(m)[1] and m.kind is ModelKind.GENT:
            continue
        ev = energy_invariants(m, 3.0 + abs(I1))
        assert ev.in_domain == (ev.locking_margin > 0)


def test_gent_hierarchy_rate():
    F = kin.simple_shear(1.5) @ kin.uniaxial(1.3)
    ref = cauchy_stress_general(NH, F).cauchy
    err = []
    for a in (1e3, 2e3, 4e3):
        err.append(np.abs(cauchy_stress_general(MaterialModel.gent(a), F).cauchy - ref).max())
    for e0, e1 in zip(err, err[1:]):
        assert e1 / e0 == pytest.approx(0.5, rel=0.2)


# limit check


def test_neo_hookean_limit_examples():
    g = energy_invariants(MaterialModel.gent(1e6), 4.0).W
    assert abs(g - 0.5) < 1e-5
    k = energy_invariants(MaterialModel.kilian(1e6), 4.0).W
    assert abs(k - 0.5) < 1e-5
    rep = neo_hookean_limit_check("neo-hookean", (1e2, 1e4))
    assert rep.errors == (0.0, 0.0)


@pytest.mark.parametrize("family", ["gent", "kilian"])
def test_neo_hookean_limit_rate(family):
    rep = neo_hookean_limit_check(family, (1e1, 1e2, 1e3, 1e4), I1bar_values=(3.5, 4.0, 6.0))
    assert rep.decreasing
    assert_allclose(rep.rates[1:], -1.0, atol=0.05)


# tangent


def test_tangent_neo_hookean_identity():
    c = tangent_tensor(NH, np.eye(3))
    I = np.eye(3)
    sym = 0.5 * (np.einsum("ik,jl->ijkl", I, I) + np.einsum("il,jk->ijkl", I, I))
    assert_allclose(c, 2.0 * sym - 4.0 / 3.0 * np.einsum("ij,kl->ijkl", I, I), atol=1e-15)


def _sym_dev(rng):
    D = rng.standard_normal((3, 3))
    D = 0.5 * (D + D.T)
    return D - np.trace(D) / 3.0 * np.eye(3)


@pytest.mark.parametrize("model", [NH, GENT5, KILIAN5])
def test_tangent_is_jaumann_rate_of_deviatoric_stress(model, rng):
    h = 1e-6
    for _ in range(20):
        F = random_isochoric(rng, 0.3) if model is not KILIAN5 else random_isochoric(rng, 0.5)
        if not energy(model, F).in_domain:
            continue
        D = _sym_dev(rng)
        Wsk = rng.standard_normal((3, 3))
        Wsk = 0.5 * (Wsk - Wsk.T)
        L = D + Wsk

        def s(Fx):
            inv = kin.invariants(Fx)
            return deviatoric_kirchhoff(model, inv, energy(model, inv))

        from scipy.linalg import expm

        sdot = (s(expm(h * L) @ F) - s(expm(-h * L) @ F)) / (2 * h)
        s0 = s(F)
        jaumann = sdot - Wsk @ s0 + s0 @ Wsk
        c = tangent_tensor(model, F)
        pred = np.einsum("ijkl,kl->ij", c, D)
        assert_allclose(pred, jaumann, rtol=1e-5, atol=1e-5 * np.abs(jaumann).max())


def test_tangent_minor_symmetries(rng):
    c = tangent_tensor(KILIAN5, random_isochoric(rng))
    assert_allclose(c, c.transpose(1, 0, 2, 3), atol=1e-13)
    assert_allclose(c, c.transpose(0, 1, 3, 2), atol=1e-13)


def test_tangent_grows_near_gent_lock():
    norms = []
    for k in range(1, 9):
        g = math.sqrt(5.0 - 10.0**-k)  # shear with I1bar = 8 - 10^-k
        norms.append(np.linalg.norm(tangent_tensor(GENT5, kin.simple_shear(g))))
    assert np.all(np.diff(norms) > 0)
    assert norms[-1] > 1e6 * norms[0]


def test_tangent_natural_state_regularization():
    with pytest.raises(SingularTangentError):
        tangent_tensor(KILIAN5, np.eye(3), regularize=False)
    c = tangent_tensor(KILIAN5, np.eye(3))
    assert np.isfinite(c).all()


def test_tangent_requires_single_invariant_energy():
    with pytest.raises(ParameterError):
        tangent_tensor(MaterialModel.kilian(5.0, f=0.2), np.eye(3))


@pytest.mark.parametrize("model", [NH, GENT5, KILIAN5])
def test_pk1_tangent_by_finite_differences(model, rng):
    F = np.eye(3)
    F[:2, :2] += 0.3 * rng.standard_normal((2, 2))
    P, A, _ = isochoric_pk1_tangent(model, F)
    h = 1e-7
    for k in range(3):
        for l in range(3):
            dF = np.zeros((3, 3))
            dF[k, l] = h
            fd = (isochoric_pk1_tangent(model, F + dF)[0] - isochoric_pk1_tangent(model, F - dF)[0]) / (2 * h)
            assert_allclose(A[:, :, k, l], fd, atol=1e-6 * np.abs(A).max())


def test_pk1_matches_deviatoric_kirchhoff_at_unit_jacobian(rng):
    F = random_isochoric(rng)
    P, _, ev = isochoric_pk1_tangent(KILIAN5, F)
    inv = kin.invariants(F)
    assert_allclose(P @ F.T, deviatoric_kirchhoff(KILIAN5, inv, ev), atol=1e-12)
