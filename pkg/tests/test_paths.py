import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.optimize import bisect

from locklab.errors import ParameterError
from locklab.materials import LockingMode, MaterialModel, cauchy_stress_general, energy_invariants
from locklab.paths import (
    Branch,
    EquilibriumCurve,
    bifurcation_detect,
    bifurcation_load,
    block_plane_strain_path,
    cube_nontrivial_path,
    cube_trivial_path,
    plane_strain_lock,
    stretch_derivatives,
)

NH = MaterialModel.neo_hookean()
GENT5 = MaterialModel.gent(5.0)
KILIAN5 = MaterialModel.kilian(5.0)
MODELS = [NH, GENT5, KILIAN5]


def W_stretch(model, l1, l2, l3=1.0):
    sq = np.array([l1, l2, l3]) ** 2
    I1 = sq.sum()
    I2 = sq[0] * sq[1] + sq[1] * sq[2] + sq[0] * sq[2]
    return energy_invariants(model, I1, I2).W


def fd_dW(model, l1, l2, h=1e-6):
    d1 = (W_stretch(model, l1 + h, l2) - W_stretch(model, l1 - h, l2)) / (2 * h)
    d2 = (W_stretch(model, l1, l2 + h) - W_stretch(model, l1, l2 - h)) / (2 * h)
    return d1, d2


def dead_load_S(model, l1):
    """Solve the two dead-load equations for S by bisection, pressure eliminated."""
    l2 = 1.0 / l1
    d1, d2 = fd_dW(model, l1, l2)
    # dW/dl_i - S - p / l_i = 0 for i = 1, 2
    res = lambda S: l1 * (d1 - S) - l2 * (d2 - S)
    return bisect(res, -1e3, 1e6, xtol=1e-13)


def test_neo_hookean_branch_value():
    c = cube_nontrivial_path(NH, [2.0])
    assert c.samples[0].S == pytest.approx(2.5, rel=1e-14)
    assert dead_load_S(NH, 2.0) == pytest.approx(2.5, rel=1e-8)


def test_kilian_stiffer_than_neo_hookean():
    k = cube_nontrivial_path(KILIAN5, [2.0]).samples[0].S
    assert k > cube_nontrivial_path(NH, [2.0]).samples[0].S
    assert k == pytest.approx(dead_load_S(KILIAN5, 2.0), rel=1e-8)


@pytest.mark.parametrize("model", MODELS)
def test_branch_residual_against_fd_oracle(model):
    lam = np.linspace(1.05, 4.0 if model is not GENT5 else 2.5, 40)
    c = cube_nontrivial_path(model, lam)
    for s in c.samples:
        d1, d2 = fd_dW(model, s.stretch1, s.stretch2)
        l1, l2 = s.stretch1, s.stretch2
        # both directions give the same pressure once S is substituted
        p1 = l1 * (d1 - s.S)
        p2 = l2 * (d2 - s.S)
        assert abs(p1 - p2) <= 1e-9 * max(1.0, abs(s.S) * l1)


@pytest.mark.parametrize("model", MODELS)
def test_branch_symmetry(model):
    lam = np.linspace(1.1, 2.2, 12)
    a = cube_nontrivial_path(model, lam).column("S")
    b = cube_nontrivial_path(model, 1.0 / lam).column("S")
    assert_allclose(a, b, rtol=1e-13)


@pytest.mark.parametrize("model", MODELS)
def test_branch_limit_and_bifurcation(model):
    assert bifurcation_load(model) == pytest.approx(2.0, rel=1e-14)
    S = cube_nontrivial_path(model, 1.0 + np.array([1e-3, 1e-5, 1e-7])).column("S")
    assert np.all(np.abs(np.diff(np.abs(S - 2.0))) >= 0) or np.abs(S - 2.0).max() < 1e-6
    assert abs(S[-1] - 2.0) < 1e-6
    tr = cube_trivial_path(model, np.linspace(0, 5, 11))
    bif = bifurcation_detect(tr, cube_nontrivial_path(model, 1.0 + 1e-3 * np.arange(1, 9)))
    assert bif.deviation / 2.0 <= 1e-6


def test_stretch_derivatives_chain_rule():
    for l1 in (0.7, 1.6, 3.1):
        d = stretch_derivatives(KILIAN5, l1, 1.0 / l1)
        fd = fd_dW(KILIAN5, l1, 1.0 / l1)
        assert_allclose(d[:2], fd, rtol=1e-8)


def test_trivial_branch():
    tr = cube_trivial_path(KILIAN5, [0.0, 2.0, 5.0])
    assert [s.stretch1 for s in tr.samples] == [1.0, 1.0, 1.0]
    assert [s.bifurcation for s in tr.samples] == [False, True, False]
    assert all(s.branch is Branch.TRIVIAL for s in tr.samples)


def test_guarded_termination_and_unguarded_flags():
    lam = np.linspace(1.5, 5.5, 81)
    g = cube_nontrivial_path(KILIAN5, lam)
    assert g.terminated_by_lock and g.terminated_at is not None
    assert all(s.in_domain for s in g.samples)
    u = cube_nontrivial_path(KILIAN5, lam, mode=LockingMode.UNGUARDED)
    assert len(u) == len(lam)
    assert any(not s.in_domain for s in u.samples)
    # stretch along the non-trivial branch is monotone
    assert np.all(np.diff(g.column("stretch1")) > 0)


def test_branch_input_errors():
    with pytest.raises(ParameterError):
        cube_nontrivial_path(NH, [1.0])
    with pytest.raises(ParameterError):
        bifurcation_detect(cube_trivial_path(NH, [0.0]), EquilibriumCurve(()))


def test_block_examples():
    c = block_plane_strain_path(NH, [1.0, 2.0])
    assert c.samples[0].sigma11 == 0.0
    assert c.samples[1].sigma11 == pytest.approx(3.75, rel=1e-14)
    s = cauchy_stress_general(NH, np.diag([2.0, 0.5, 1.0])).cauchy
    assert c.samples[1].sigma11 == pytest.approx(s[0, 0] - s[1, 1], rel=1e-12)
    assert c.samples[1].S == pytest.approx(3.75 / 2.0)


@given(st.floats(0.3, 4.8))
def test_block_matches_general_evaluation(l1):
    c = block_plane_strain_path(KILIAN5, [l1])
    s = cauchy_stress_general(KILIAN5, np.diag([l1, 1.0 / l1, 1.0])).cauchy
    ref = s[0, 0] - s[1, 1]
    assert c.samples[0].sigma11 == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_block_diverges_at_plane_strain_lock():
    lock = plane_strain_lock(KILIAN5)
    assert lock == pytest.approx(4.8947, abs=5e-5)
    vals = block_plane_strain_path(KILIAN5, lock * (1 - 10.0 ** -np.arange(1, 9))).column("sigma11")
    assert np.all(np.diff(vals) > 0)
    g = block_plane_strain_path(KILIAN5, np.linspace(1.0, 5.0, 41))
    assert g.terminated_by_lock and g.samples[-1].stretch1 < lock
    assert math.isinf(plane_strain_lock(NH))
