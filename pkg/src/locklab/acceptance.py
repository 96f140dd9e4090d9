"""Executable acceptance checks, shared by ``locklab verify`` and the test suite.

Every check returns :class:`Check` records carrying the anchor claim,
the expected value, what was computed and the tolerance applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from locklab.config import CASES
from locklab.fem.cases import run_three_element_strip
from locklab.fem.mesh import PrescribedDisplacement, rectangle
from locklab.fem.solver import FemProblem, SolverConfig, assemble, initial_state, solve, solve_increment
from locklab.homogeneous import CaseKind, asymptote, deformation_gradient, response
from locklab.materials import (
    LockingMode,
    MaterialModel,
    cauchy_stress_general,
    energy_invariants,
    locking_limit,
)
from locklab.paths import bifurcation_detect, cube_nontrivial_path, cube_trivial_path
from locklab.runner import execute

REFERENCE_UNIAXIAL_LOCK = 4.96
REFERENCE_STRIP_STRETCH = 2.78


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    anchor: str
    expected: str
    got: str
    tolerance: str
    passed: bool

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.criterion}.{self.name}: anchor={self.anchor!r} "
            f"expected={self.expected} got={self.got} tol={self.tolerance}"
        )


MODELS = {
    "neo-hookean": MaterialModel.neo_hookean(),
    "gent(a=5)": MaterialModel.gent(5.0),
    "kilian(a=5)": MaterialModel.kilian(5.0),
    "kilian(a=3)": MaterialModel.kilian(3.0),
}


# 1. asymptote placement


def check_asymptote():
    k5 = MaterialModel.kilian(5.0)
    uni = asymptote(k5, CaseKind.UNIAXIAL)[-1]
    ps = asymptote(k5, CaseKind.PLANE_STRAIN)[-1]
    out = [
        Check(
            1, "uniaxial-asymptote", "Kilian a=5 uniaxial locking stretch 4.96",
            f"{REFERENCE_UNIAXIAL_LOCK}", f"{uni:.6f} (plane-strain candidate {ps:.6f}, "
            f"|diff| {abs(uni - REFERENCE_UNIAXIAL_LOCK):.4f} vs {abs(ps - REFERENCE_UNIAXIAL_LOCK):.4f})",
            "+-0.01", abs(uni - REFERENCE_UNIAXIAL_LOCK) <= 0.01,
        )
    ]
    # the single element is a plane-strain block: its lock is the applicable asymptote
    for name in ("fig5-1", "fig5-2"):
        rep = execute(CASES[name].with_mode(LockingMode.GUARDED)).report
        lam = rep["final_stretch1"]
        below = (ps - lam) / ps
        below_uni = (uni - lam) / uni
        out.append(
            Check(
                1, f"{name}-guarded-last-stretch", "guarded single-element run ends just below the lock",
                f"within 2% below {ps:.6f}", f"{lam:.6f} ({100 * below:.3f}% below plane-strain, "
                f"{100 * below_uni:.3f}% below uniaxial)", "0 <= gap <= 2%", 0.0 <= below <= 0.02,
            )
        )
    return out


# 2. bifurcation load


def check_bifurcation():
    out = []
    stretches = 1.0 + 1e-3 * np.arange(1, 9)
    loads = np.linspace(0.0, 5.0, 11)
    for label in ("neo-hookean", "gent(a=5)", "kilian(a=5)"):
        m = MODELS[label]
        bif = bifurcation_detect(cube_trivial_path(m, loads), cube_nontrivial_path(m, stretches), order=4)
        rel = bif.deviation / (2.0 * m.mu0)
        out.append(
            Check(2, f"bifurcation-{label}", "bifurcation at S = 2 mu0", "2.0", f"{bif.S:.12f}", "1e-6 rel", rel <= 1e-6)
        )
    return out


# 3. three-element strip


def strip_runs():
    cfg = CASES["fig5-3"]
    solver = cfg.fem.solver_config
    m = cfg.model
    g = run_three_element_strip(m, cfg.fem.target, solver(LockingMode.GUARDED), cfg.fem.fix_u1_driven)
    u = run_three_element_strip(m, cfg.fem.target, solver(LockingMode.UNGUARDED), cfg.fem.fix_u1_driven)
    return g, u


def check_strip(runs=None):
    g, u = strip_runs() if runs is None else runs
    le = g.max_exp_le1
    limit = g.limit
    return [
        Check(
            3, "strip-guarded-max-stretch", "guarded strip ends at stretch 2.78 near the a=3 lock",
            "[2.73, 2.83]", f"{le:.5f} (termination {g.termination}, total-B value {g.max_exp_le1_total:.5f})",
            "interval", g.termination == "locking" and 2.73 <= le <= 2.83,
        ),
        Check(
            3, "strip-guarded-one-element", "guard fires in a single element",
            "exactly 1 element at its lock", f"{len(g.locked_elements)} {list(g.locked_elements)} "
            f"(final margins {np.array2string(g.element_margin[-1], precision=2)})",
            "count == 1", g.termination == "locking" and len(g.locked_elements) == 1,
        ),
        Check(
            3, "strip-unguarded-violation", "unguarded strip passes the lock",
            f"some converged bound > {limit:g}", f"max {u.max_bound():.4f} in {len(u.violated_states())} violated states",
            "strict", u.max_bound() > limit,
        ),
    ]


# 4. closed forms vs general evaluation


def _oracle(model, kind, x):
    st = cauchy_stress_general(model, deformation_gradient(kind, x), 0.0, mode=LockingMode.UNGUARDED)
    s = st.cauchy
    if kind == "uniaxial":
        p = s[1, 1]
    elif kind == "biaxial":
        p = s[2, 2]
    else:
        p = 0.0
    return s - p * np.eye(3)


def sample_controls(model, kind, n, rng, gap=1e-3):
    """Uniform in-domain controls kept ``gap`` (relative) away from the asymptotes."""
    kind = CaseKind(kind)
    roots = asymptote(model, kind)
    if kind is CaseKind.SHEAR:
        hi = roots[0] if math.isfinite(roots[0]) else 5.0
        return rng.uniform(-hi * (1 - gap), hi * (1 - gap), n)
    if math.isinf(roots[-1]):
        lo, hi = 0.2, 5.0
    else:
        lo, hi = roots
    return rng.uniform(lo * (1 + gap), hi * (1 - gap), n)


def closed_form_errors(model, kind, controls):
    errs = []
    for x in controls:
        r = response(model, kind, float(x))
        ref = _oracle(model, kind, float(x))
        scale = max(np.abs(ref).max(), np.finfo(float).tiny)
        errs.append(np.abs(r.as_matrix() - ref).max() / scale)
    return np.array(errs)


def check_closed_forms(n=1000, seed=20261014):
    rng = np.random.default_rng(seed)
    out = []
    for label in ("neo-hookean", "gent(a=5)", "kilian(a=5)", "kilian(a=3)"):
        m = MODELS[label]
        for kind in ("shear", "uniaxial", "biaxial"):
            err = closed_form_errors(m, kind, sample_controls(m, kind, n, rng))
            out.append(
                Check(
                    4, f"closed-form-{kind}-{label}", "closed forms equal stress from the energy",
                    "0", f"max rel {err.max():.2e} over {n}", "1e-10 rel", err.max() <= 1e-10,
                )
            )
    return out


# 5. derivatives, tangent, Newton


def derivative_errors(model, n, rng, h=1e-5):
    """Central-difference errors of the first and second ``I1bar`` derivatives."""
    _, limit = locking_limit(model)
    hi = 20.0 if math.isinf(limit) else 3.0 + 0.95 * (limit - 3.0)
    e1, e2 = [], []
    for I1 in rng.uniform(3.05, hi, n):
        ev = energy_invariants(model, I1)
        wp = energy_invariants(model, I1 + h)
        wm = energy_invariants(model, I1 - h)
        scale1 = abs(ev.dW_dI1)
        e1.append(abs((wp.W - wm.W) / (2 * h) - ev.dW_dI1) / scale1)
        d2 = (wp.dW_dI1 - wm.dW_dI1) / (2 * h)
        scale2 = max(abs(ev.d2W_dI1I1), 1e-8 * model.mu0)
        e2.append(abs(d2 - ev.d2W_dI1I1) / scale2 if ev.d2W_dI1I1 else abs(d2))
    return np.array(e1), np.array(e2)


def tangent_fd_error(model, seed=0, h=1e-7, amplitude=0.15):
    """Max entry error of the assembled tangent vs central differences, relative to max |K|."""
    rng = np.random.default_rng(seed)
    mesh = rectangle(1, 1)
    prob = FemProblem(mesh, model, (PrescribedDisplacement(mesh.nodes_where(x=0.0), 0),))
    x = np.zeros(prob.n_unknowns)
    x[: mesh.n_dofs] = amplitude * rng.standard_normal(mesh.n_dofs)
    x[mesh.n_dofs :] = 0.3 * rng.standard_normal(mesh.n_elements)
    K = assemble(prob, x, 0.0, mode=LockingMode.UNGUARDED).tangent
    fd = np.zeros_like(K)
    for j in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        rp = assemble(prob, xp, 0.0, mode=LockingMode.UNGUARDED).residual
        rm = assemble(prob, xm, 0.0, mode=LockingMode.UNGUARDED).residual
        fd[:, j] = (rp - rm) / (2 * h)
    return float(np.abs(K - fd).max() / np.abs(K).max())


def shear_newton_history(model=None, gamma=1.2):
    """Residual norms of one large Newton increment on a sheared element."""
    model = MaterialModel.neo_hookean() if model is None else model
    mesh = rectangle(1, 1)
    bottom = mesh.nodes_where(y=0.0)
    top = mesh.nodes_where(y=1.0)
    bcs = (
        PrescribedDisplacement(bottom, 0),
        PrescribedDisplacement(bottom, 1),
        PrescribedDisplacement(top, 0, gamma),
    )
    prob = FemProblem(mesh, model, bcs, SolverConfig(tolerance=1e-14, absolute_tolerance=1e-14))
    st = initial_state(prob)
    # no predictor, so the iteration starts far from the solution
    st = type(st)(st.x, st.load_factor, st.records, None, st.internal)
    _, rep = solve_increment(prob, st, 1.0)
    return np.array(rep.residual_history)


def quadratic_ratios(history):
    h = np.asarray(history) / history[0]
    ratios = []
    for k in range(len(h) - 1):
        if h[k + 1] > 1e-13 and h[k] > 0:
            ratios.append(h[k + 1] / h[k] ** 2)
    return np.array(ratios)


def check_derivatives(n=1000, seed=5):
    rng = np.random.default_rng(seed)
    out = []
    for label in ("neo-hookean", "gent(a=5)", "kilian(a=5)", "kilian(a=3)"):
        m = MODELS[label]
        e1, e2 = derivative_errors(m, n, rng)
        out.append(
            Check(5, f"fd-derivatives-{label}", "derivative forms of the energy", "0",
                  f"max rel d1 {e1.max():.1e}, d2 {e2.max():.1e}", "1e-6 rel", max(e1.max(), e2.max()) <= 1e-6)
        )
    for label in ("neo-hookean", "gent(a=5)", "kilian(a=5)"):
        err = max(tangent_fd_error(MODELS[label], seed=s) for s in range(3))
        out.append(
            Check(5, f"fe-tangent-{label}", "assembled tangent is the residual Jacobian", "0",
                  f"max rel {err:.1e}", "1e-4 rel", err <= 1e-4)
        )
    hist = shear_newton_history()
    ratios = quadratic_ratios(hist)
    iters = len(hist) - 1
    out.append(
        Check(5, "newton-quadratic", "Newton with the exact tangent", "bounded e_k+1/e_k^2",
              f"ratios {np.array2string(ratios, precision=2)} in {iters} iterations", "<= 10",
              len(ratios) >= 2 and ratios.max() <= 10.0)
    )
    return out


# 6. neo-Hookean limit


def check_nh_limit():
    out = []
    for a in (1e2, 1e4, 1e6):
        W = energy_invariants(MaterialModel.gent(a), 4.0).W
        dev = abs(W - 0.5)
        out.append(
            Check(6, f"gent-limit-a={a:g}", "a -> inf recovers neo-Hookean", f"<= {1.1 / (2 * a):.3e}",
                  f"{dev:.3e}", "1/(2a) + 10%", dev <= 1.1 / (2 * a))
        )
    a_seq = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)
    devs = [abs(energy_invariants(MaterialModel.kilian(a), 4.0).W - 0.5) for a in a_seq]
    mono = all(devs[i + 1] < devs[i] for i in range(len(devs) - 1))
    out.append(
        Check(6, "kilian-limit-monotone", "a -> inf recovers neo-Hookean", "strictly decreasing",
              ", ".join(f"{d:.2e}" for d in devs), "monotone", mono)
    )
    return out


# 7. guarded invariant and mode equivalence


def random_ramps(n, seed=7):
    """Randomized (model, case, target) FE ramps pushed towards or past the lock."""
    rng = np.random.default_rng(seed)
    labels = ("gent(a=5)", "kilian(a=5)", "kilian(a=3)")
    out = []
    for _ in range(n):
        label = labels[rng.integers(len(labels))]
        case = ("traction", "displacement", "strip")[rng.integers(3)]
        if case == "traction":
            target = float(rng.uniform(5.0, 300.0))
        elif case == "displacement":
            target = float(rng.uniform(1.5, 7.0))
        else:
            target = float(rng.uniform(1.0, 10.0))
        out.append((label, case, target))
    return out


def guarded_run(label, case, target, mode=LockingMode.GUARDED):
    from locklab.config import FemSpec, RunConfig
    from locklab.runner import fem_problem

    cfg = RunConfig(model=MODELS[label], command="fem", name="ramp", mode=mode, fem=FemSpec(case, target))
    prob, _ = fem_problem(cfg)
    return solve(prob)


def guarded_violations(result):
    return sum(int((st.records.margin <= 0).any()) for st in result.history)


def mode_agreement(label, case, target):
    """Max state difference over the common in-domain prefix of both modes."""
    g = guarded_run(label, case, target, LockingMode.GUARDED)
    u = guarded_run(label, case, target, LockingMode.UNGUARDED)
    diff = 0.0
    compared = 0
    for sg, su in zip(g.history, u.history):
        if sg.load_factor != su.load_factor or not su.records.in_domain.all():
            break
        scale = max(1.0, np.abs(sg.x).max())
        diff = max(diff, float(np.abs(sg.x - su.x).max() / scale))
        compared += 1
    return diff, compared


def check_guarded(n=12):
    out = []
    bad = 0
    states = 0
    for label, case, target in random_ramps(n):
        res = guarded_run(label, case, target)
        bad += guarded_violations(res)
        states += len(res.history)
    out.append(
        Check(7, "guarded-invariant", "per-element guard keeps every converged state in the domain",
              "0 violated states", f"{bad} of {states} over {n} random ramps", "exact", bad == 0)
    )
    for label, case, target in (("kilian(a=5)", "displacement", 6.0), ("kilian(a=3)", "strip", 10.0), ("gent(a=5)", "traction", 100.0)):
        diff, compared = mode_agreement(label, case, target)
        out.append(
            Check(7, f"mode-agreement-{case}-{label}", "modes differ only at and after the lock", "0",
                  f"max rel diff {diff:.1e} over {compared} states", "1e-8", compared >= 2 and diff <= 1e-8)
        )
    return out


# 8. unguarded pathology


def check_unguarded():
    rep = execute(CASES["fig5-2"].with_mode(LockingMode.UNGUARDED))
    t = rep.table
    lam = np.array(t.column("stretch1"), dtype=float)
    flag = np.array(t.column("in_domain"), dtype=bool)
    lock = asymptote(CASES["fig5-2"].model, CaseKind.PLANE_STRAIN)[-1]
    beyond = lam > lock
    ok = bool(beyond.any()) and not bool(flag[beyond].any())
    return [
        Check(8, "fig5-2-unguarded-skips-asymptote", "unguarded displacement run passes the lock",
              "converged samples past the lock, all flagged",
              f"{int(beyond.sum())} samples past {lock:.4f} (max {lam.max():.4f}, termination "
              f"{rep.report['termination']}), {int((~flag[beyond]).sum())} flagged", "existence", ok)
    ]


def run_all(quick=False):
    n = 100 if quick else 1000
    checks = []
    checks += check_asymptote()
    checks += check_bifurcation()
    checks += check_strip()
    checks += check_closed_forms(n)
    checks += check_derivatives(n)
    checks += check_nh_limit()
    checks += check_guarded(6 if quick else 12)
    checks += check_unguarded()
    return checks
