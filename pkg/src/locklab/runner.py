"""Execute run configurations into long-format tables and FE run reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from locklab.config import RunConfig
from locklab.errors import LockingViolation
from locklab.fem.cases import single_element_displacement_problem, single_element_traction_problem, strip_problem
from locklab.fem.solver import solve
from locklab.homogeneous import CaseKind, asymptote, energy_surface, response
from locklab.materials import LockingMode, locking_limit
from locklab.paths import (
    block_plane_strain_path,
    bifurcation_detect,
    cube_nontrivial_path,
    cube_trivial_path,
)

FLOAT_FORMAT = ".12g"


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return format(x, FLOAT_FORMAT)


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)

    def add(self, **values):
        self.rows.append(tuple(values[c] for c in self.columns))

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()


@dataclass
class RunOutput:
    name: str
    table: Table
    report: dict | None = None

    def report_json(self):
        return json.dumps(self.report, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(type(x))


def _finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


SWEEP_COLUMNS = (
    "model", "mode", "case", "control", "sigma11", "sigma22", "sigma33", "sigma12",
    "I1bar", "locking_margin", "at_asymptote", "in_domain",
)


def run_sweep(cfg: RunConfig, scale=1.0) -> RunOutput:
    """Homogeneous responses; guarded sweeps stop at the first locked control."""
    t = Table(SWEEP_COLUMNS)
    for model in cfg.models:
        s = scale / model.mu0
        for sw in cfg.sweeps:
            for x in np.linspace(sw.range[0], sw.range[1], sw.steps):
                try:
                    r = response(model, sw.kind, float(x), cfg.mode)
                except LockingViolation:
                    break
                t.add(
                    model=model.label, mode=cfg.mode.value, case=sw.kind, control=r.control,
                    sigma11=s * r.sigma11, sigma22=s * r.sigma22, sigma33=s * r.sigma33, sigma12=s * r.sigma12,
                    I1bar=r.I1bar, locking_margin=r.locking_margin, at_asymptote=r.at_asymptote,
                    in_domain=r.locking_margin > 0,
                )
    return RunOutput(cfg.name, t)


PATH_COLUMNS = (
    "model", "mode", "branch", "S", "stretch1", "stretch2", "sigma11", "locking_margin", "in_domain", "bifurcation",
)


def run_path(cfg: RunConfig, scale=1.0) -> RunOutput:
    p = cfg.path
    t = Table(PATH_COLUMNS)
    report = {"name": cfg.name, "problem": p.problem, "models": {}}
    stretches = np.linspace(p.range[0], p.range[1], p.steps)
    for model in cfg.models:
        s = scale / model.mu0
        curves = []
        entry = {}
        if p.problem == "cube":
            stretches = stretches[stretches != 1.0]
            nt = cube_nontrivial_path(model, stretches, cfg.mode)
            tr = cube_trivial_path(model, np.linspace(p.loads[0], p.loads[1], p.load_steps))
            curves = [tr, nt]
            near = [smp for smp in nt.samples if smp.stretch1 > 1.0]
            if near:
                bif = bifurcation_detect(tr, nt, mu0=model.mu0)
                entry["bifurcation_S"] = bif.S * s
                entry["bifurcation_deviation"] = bif.deviation * s
        else:
            nt = block_plane_strain_path(model, stretches, cfg.mode)
            curves = [nt]
        entry["terminated_by_lock"] = nt.terminated_by_lock
        entry["terminated_at"] = nt.terminated_at
        report["models"][model.label] = entry
        for c in curves:
            for smp in c.samples:
                t.add(
                    model=model.label, mode=cfg.mode.value, branch=smp.branch.value, S=s * smp.S,
                    stretch1=smp.stretch1, stretch2=smp.stretch2, sigma11=s * smp.sigma11,
                    locking_margin=smp.locking_margin, in_domain=smp.in_domain, bifurcation=smp.bifurcation,
                )
    return RunOutput(cfg.name, t, report)


SURFACE_COLUMNS = ("model", "stretch1", "stretch2", "W", "bound_value", "in_domain")


def run_surface(cfg: RunConfig, scale=1.0) -> RunOutput:
    sp = cfg.surface
    grid = np.linspace(sp.range[0], sp.range[1], sp.steps)
    t = Table(SURFACE_COLUMNS)
    for model in cfg.models:
        surf = energy_surface(model, grid, grid)
        s = scale / model.mu0
        for i, x in enumerate(grid):
            for j, y in enumerate(grid):
                t.add(
                    model=model.label, stretch1=x, stretch2=y, W=s * surf.W[i, j],
                    bound_value=surf.bound_value[i, j], in_domain=surf.in_domain[i, j],
                )
    return RunOutput(cfg.name, t)


def fem_problem(cfg: RunConfig):
    """Problem, driven dofs and reaction component for an FE configuration."""
    fs = cfg.fem
    solver = fs.solver_config(cfg.mode)
    if fs.case == "traction":
        prob = single_element_traction_problem(cfg.model, fs.target, solver)
        return prob, None
    if fs.case == "displacement":
        prob = single_element_displacement_problem(cfg.model, fs.target, solver)
        right = np.array(prob.mesh.nodes_where(x=1.0))
        return prob, 2 * right
    prob = strip_problem(cfg.model, fs.target, solver, fix_u1_driven=fs.fix_u1_driven)
    right = np.array(prob.mesh.nodes_where(x=float(prob.mesh.nodes[:, 0].max())))
    return prob, 2 * right + 1


def fem_columns(n_elements):
    base = (
        "model", "mode", "case", "state", "load_factor", "control", "reaction", "stretch1", "sigma11",
        "max_exp_le1", "max_bound", "min_margin", "in_domain",
    )
    return base + tuple(f"margin_e{e}" for e in range(n_elements))


def run_fem(cfg: RunConfig, scale=1.0) -> RunOutput:
    fs = cfg.fem
    model = cfg.model
    prob, driven = fem_problem(cfg)
    result = solve(prob)
    s = scale / model.mu0
    n_el = prob.mesh.n_elements
    t = Table(fem_columns(n_el))
    bounds = []
    minmargins = []
    exp_le1 = []
    for k, st in enumerate(result.history):
        rec = st.records
        margins = rec.element_margin()
        le = float(np.exp(rec.max_principal_log_strain()).max())
        exp_le1.append(le)
        bounds.append(float(rec.bound_value.max()))
        minmargins.append(float(margins.min()))
        # traction runs report the applied dead load, displacement runs the reaction
        reaction = st.load_factor * fs.target if driven is None else float(st.internal[driven].sum())
        row = dict(
            model=model.label, mode=cfg.mode.value, case=fs.case, state=k, load_factor=st.load_factor,
            control=st.load_factor * fs.target, reaction=s * reaction,
            stretch1=float(rec.stretch1()[0].mean()), sigma11=s * float(rec.sigma[0, :, 0, 0].mean()),
            max_exp_le1=le, max_bound=bounds[-1], min_margin=float(margins.min()),
            in_domain=bool(rec.in_domain.all()),
        )
        row.update({f"margin_e{e}": float(margins[e]) for e in range(n_el)})
        t.add(**row)
    final = result.final.records
    quantity, limit = locking_limit(model)
    report = {
        "name": cfg.name,
        "case": fs.case,
        "model": model.label,
        "mode": cfg.mode.value,
        "target": fs.target,
        "termination": result.termination,
        "limiting_element": result.limiting_element,
        "limiting_margin": _finite_or_none(result.limiting_margin),
        "locked_elements": list(result.violating_elements) if result.termination == "locking" else [],
        "final_load_factor": result.final.load_factor,
        "final_control": result.final.load_factor * fs.target,
        "final_stretch1": float(final.stretch1()[0].mean()),
        "max_exp_le1": exp_le1[-1],
        "max_exp_le1_total": float(np.exp(final.max_principal_log_strain(isochoric=False)).max()),
        "max_exp_le11": float(np.exp(final.log_strain[..., 0, 0]).max()),
        "converged_states": len(result.history),
        "violated_states": int(sum(1 for m in minmargins if m <= 0)),
        "max_bound_value": max(bounds),
        "bound_quantity": quantity,
        "bound_limit": _finite_or_none(limit),
        "asymptote_uniaxial": _finite_or_none(asymptote(model, CaseKind.UNIAXIAL)[-1]),
        "asymptote_plane_strain": _finite_or_none(asymptote(model, CaseKind.PLANE_STRAIN)[-1]),
    }
    if fs.case == "strip":
        report["fix_u1_driven"] = fs.fix_u1_driven
    return RunOutput(cfg.name, t, report)


RUNNERS = {"sweep": run_sweep, "path": run_path, "surface": run_surface, "fem": run_fem}


def execute(cfg: RunConfig, scale=1.0) -> RunOutput:
    return RUNNERS[cfg.command](cfg, scale)
