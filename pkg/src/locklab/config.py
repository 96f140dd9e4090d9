"""INI run configurations and the built-in case library.

Grammar (``configparser`` syntax, ``;`` or ``#`` comments)::

    [model]                 ; required
    kind = kilian           ; kilian | gent | neo-hookean
    mu0 = 1
    a = 5                   ; kilian, gent only
    alpha = 0               ; kilian only
    f = 0                   ; kilian only

    [reference]             ; optional second model, same keys

    [run]
    command = sweep         ; sweep | path | surface | fem
    name = my-run           ; output file stem
    mode = guarded          ; guarded | unguarded

    [sweep:<kind>]          ; one section per kind: shear | uniaxial | biaxial
    range = 0..2            ; control range, inclusive
    steps = 100             ; >= 2

    [path]
    problem = cube          ; cube | block
    range = 1.001..4.8      ; stretch range
    steps = 200
    loads = 0..5            ; cube only: trivial-branch load range
    load_steps = 11

    [surface]
    range = 0.2..5
    steps = 60

    [fem]
    case = strip            ; traction | displacement | strip
    target = 10             ; final S, stretch or u2
    fix_u1_driven = false   ; strip only
    kappa = inf
    tolerance = 1e-9
    max_iterations = 25
    initial_increment = 0.05
    min_increment = 1e-6
    max_increment = 0.1
    cut_factor = 0.5

Unknown sections and keys are errors. ``ConfigError`` messages carry the
line number of the offending entry when it is known.
"""

from __future__ import annotations

import configparser
import io
import math
import re
from dataclasses import dataclass, field, replace

from locklab.errors import ParameterError
from locklab.fem.solver import SolverConfig
from locklab.materials import LockingMode, MaterialModel, ModelKind


class ConfigError(ValueError):
    def __init__(self, message, line=None, source="<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


COMMANDS = ("sweep", "path", "surface", "fem")
SWEEP_KINDS = ("shear", "uniaxial", "biaxial")
MODEL_KEYS = ("kind", "mu0", "a", "alpha", "f")
RUN_KEYS = ("command", "name", "mode")
PATH_KEYS = ("problem", "range", "steps", "loads", "load_steps")
SURFACE_KEYS = ("range", "steps")
SWEEP_KEYS = ("range", "steps")
FEM_CASES = ("traction", "displacement", "strip")
FEM_SOLVER_KEYS = (
    "kappa",
    "tolerance",
    "max_iterations",
    "initial_increment",
    "min_increment",
    "max_increment",
    "cut_factor",
)
FEM_KEYS = ("case", "target", "fix_u1_driven") + FEM_SOLVER_KEYS

_RANGE = re.compile(r"^\s*([^.\s][^\s]*?)\s*\.\.\s*([^\s]+)\s*$")


def parse_range(text):
    """``"a..b"`` to a pair of finite floats."""
    m = _RANGE.match(text)
    if not m:
        raise ValueError(f"expected 'start..stop', got {text!r}")
    lo, hi = float(m.group(1)), float(m.group(2))
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("range bounds must be finite")
    return lo, hi


def format_range(r):
    return f"{_num(r[0])}..{_num(r[1])}"


def _num(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    range: tuple
    steps: int

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        _check_grid(self.range, self.steps)


@dataclass(frozen=True)
class PathSpec:
    problem: str = "cube"
    range: tuple = (1.001, 4.8)
    steps: int = 200
    loads: tuple = (0.0, 5.0)
    load_steps: int = 11

    def __post_init__(self):
        if self.problem not in ("cube", "block"):
            raise ValueError(f"unknown path problem {self.problem!r}")
        _check_grid(self.range, self.steps)
        _check_grid(self.loads, self.load_steps)


@dataclass(frozen=True)
class SurfaceSpec:
    range: tuple = (0.2, 5.0)
    steps: int = 60

    def __post_init__(self):
        _check_grid(self.range, self.steps)
        if self.range[0] <= 0:
            raise ValueError("surface stretches must be positive")


@dataclass(frozen=True)
class FemSpec:
    case: str = "strip"
    target: float = 10.0
    fix_u1_driven: bool = False
    solver: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.case not in FEM_CASES:
            raise ValueError(f"unknown fem case {self.case!r}")
        if not math.isfinite(self.target):
            raise ValueError("fem target must be finite")
        unknown = set(self.solver) - set(FEM_SOLVER_KEYS)
        if unknown:
            raise ValueError(f"unknown solver settings {sorted(unknown)}")

    def solver_config(self, mode):
        return SolverConfig(locking_mode=LockingMode(mode), **self.solver)


def _check_grid(r, steps):
    if len(r) != 2 or not all(math.isfinite(v) for v in r):
        raise ValueError("control ranges must be finite")
    if r[1] < r[0]:
        raise ValueError("control range is empty (stop < start)")
    if int(steps) != steps or steps < 2:
        raise ValueError("step count must be an integer >= 2")


@dataclass(frozen=True)
class RunConfig:
    model: MaterialModel
    command: str
    name: str = "run"
    mode: LockingMode = LockingMode.GUARDED
    reference: MaterialModel | None = None
    sweeps: tuple = ()
    path: PathSpec | None = None
    surface: SurfaceSpec | None = None
    fem: FemSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", LockingMode(self.mode))
        object.__setattr__(self, "sweeps", tuple(self.sweeps))
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        need = {"sweep": bool(self.sweeps), "path": self.path, "surface": self.surface, "fem": self.fem}
        if not need[self.command]:
            raise ValueError(f"command {self.command!r} needs its [{self.command}] section")
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", self.name):
            raise ValueError(f"run name {self.name!r} must be a plain file stem")

    @property
    def models(self):
        return (self.model,) if self.reference is None else (self.model, self.reference)

    def with_mode(self, mode):
        return replace(self, mode=LockingMode(mode))

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["model"] = _model_items(self.model)
        if self.reference is not None:
            cp["reference"] = _model_items(self.reference)
        cp["run"] = {"command": self.command, "name": self.name, "mode": self.mode.value}
        for sw in self.sweeps:
            cp[f"sweep:{sw.kind}"] = {"range": format_range(sw.range), "steps": str(sw.steps)}
        if self.path is not None:
            cp["path"] = {
                "problem": self.path.problem,
                "range": format_range(self.path.range),
                "steps": str(self.path.steps),
                "loads": format_range(self.path.loads),
                "load_steps": str(self.path.load_steps),
            }
        if self.surface is not None:
            cp["surface"] = {"range": format_range(self.surface.range), "steps": str(self.surface.steps)}
        if self.fem is not None:
            items = {"case": self.fem.case, "target": _num(self.fem.target), "fix_u1_driven": _num(self.fem.fix_u1_driven)}
            for k in FEM_SOLVER_KEYS:
                if k in self.fem.solver:
                    items[k] = _num(self.fem.solver[k])
            cp["fem"] = items
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _model_items(model):
    out = {"kind": model.kind.value, "mu0": _num(model.mu0)}
    if model.kind is not ModelKind.NEO_HOOKEAN:
        out["a"] = _num(model.a)
    if model.kind is ModelKind.KILIAN:
        out["alpha"] = _num(model.alpha)
        out["f"] = _num(model.f)
    return out


def _line_index(text):
    """Map ``(section, key)`` and ``section`` to 1-based line numbers."""
    lines = {}
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in ";#":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            lines.setdefault(section, n)
        elif section is not None:
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
            lines.setdefault((section, key), n)
    return lines


def parse_config(text: str, source="<config>") -> RunConfig:
    """Parse and validate an INI run configuration."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None), source) from None
    lines = _line_index(text)

    def fail(msg, section, key=None):
        raise ConfigError(msg, lines.get((section, key), lines.get(section)), source)

    allowed = {"model": MODEL_KEYS, "reference": MODEL_KEYS, "run": RUN_KEYS, "path": PATH_KEYS,
               "surface": SURFACE_KEYS, "fem": FEM_KEYS}
    for sec in cp.sections():
        keys = SWEEP_KEYS if sec.startswith("sweep:") else allowed.get(sec)
        if keys is None:
            fail(f"unknown section [{sec}]", sec)
        for key in cp[sec]:
            if key not in keys:
                fail(f"unknown key {key!r} in [{sec}]", sec, key)

    def get(sec, key, conv, default=None, required=False):
        if key not in cp[sec]:
            if required:
                fail(f"missing key {key!r} in [{sec}]", sec)
            return default
        raw = cp[sec][key]
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            fail(f"bad value for {key!r}: {exc}", sec, key)

    def model_from(sec):
        kind = get(sec, "kind", str, required=True)
        try:
            return MaterialModel(
                ModelKind(kind),
                mu0=get(sec, "mu0", float, 1.0),
                a=get(sec, "a", float),
                alpha=get(sec, "alpha", float, 0.0),
                f=get(sec, "f", float, 0.0),
            )
        except (ParameterError, ValueError) as exc:
            fail(f"invalid model: {exc}", sec, "kind")

    if "model" not in cp:
        raise ConfigError("missing [model] section", None, source)
    if "run" not in cp:
        raise ConfigError("missing [run] section", None, source)
    model = model_from("model")
    reference = model_from("reference") if "reference" in cp else None

    def build(sec, cls, **kw):
        try:
            return cls(**kw)
        except (ValueError, TypeError) as exc:
            fail(str(exc), sec)

    sweeps = []
    for sec in cp.sections():
        if sec.startswith("sweep:"):
            sweeps.append(
                build(sec, SweepSpec, kind=sec.split(":", 1)[1].strip(),
                      range=get(sec, "range", parse_range, required=True), steps=get(sec, "steps", _steps, 100))
            )
    path = surface = fem = None
    if "path" in cp:
        d = PathSpec()
        path = build(
            "path", PathSpec,
            problem=get("path", "problem", str, d.problem),
            range=get("path", "range", parse_range, d.range),
            steps=get("path", "steps", _steps, d.steps),
            loads=get("path", "loads", parse_range, d.loads),
            load_steps=get("path", "load_steps", _steps, d.load_steps),
        )
    if "surface" in cp:
        d = SurfaceSpec()
        surface = build("surface", SurfaceSpec, range=get("surface", "range", parse_range, d.range),
                        steps=get("surface", "steps", _steps, d.steps))
    if "fem" in cp:
        solver = {}
        for k in FEM_SOLVER_KEYS:
            conv = int if k == "max_iterations" else float
            v = get("fem", k, conv)
            if v is not None:
                solver[k] = v
        fem = build(
            "fem", FemSpec,
            case=get("fem", "case", str, "strip"),
            target=get("fem", "target", float, required=True),
            fix_u1_driven=get("fem", "fix_u1_driven", _boolean, False),
            solver=solver,
        )
        try:
            fem.solver_config(LockingMode.GUARDED)
        except (ParameterError, TypeError) as exc:
            fail(f"invalid solver settings: {exc}", "fem")
    mode = get("run", "mode", str, "guarded")
    try:
        mode = LockingMode(mode)
    except ValueError:
        fail(f"unknown locking mode {mode!r}", "run", "mode")
    try:
        return RunConfig(
            model=model,
            command=get("run", "command", str, required=True),
            name=get("run", "name", str, "run"),
            mode=mode,
            reference=reference,
            sweeps=tuple(sweeps),
            path=path,
            surface=surface,
            fem=fem,
        )
    except ValueError as exc:
        fail(str(exc), "run", "command")


def _steps(text):
    n = int(text)
    if n < 2:
        raise ValueError("step count must be an integer >= 2")
    return n


def _boolean(text):
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


# Case library

_KILIAN5 = MaterialModel.kilian(5.0)
_GENT5 = MaterialModel.gent(5.0)
_NH = MaterialModel.neo_hookean()


def _case_library():
    lib = {}
    lib["fig3-1"] = RunConfig(
        model=_KILIAN5, reference=_GENT5, command="surface", name="fig3-1", surface=SurfaceSpec((0.2, 5.0), 60)
    )
    lib["fig4-1"] = RunConfig(
        model=_GENT5,
        reference=_NH,
        command="sweep",
        name="fig4-1",
        sweeps=(
            SweepSpec("uniaxial", (0.5, 2.65), 200),
            SweepSpec("biaxial", (0.7, 1.95), 200),
            SweepSpec("shear", (0.0, 2.2), 200),
        ),
    )
    lib["fig4-2"] = RunConfig(
        model=_KILIAN5,
        reference=_NH,
        command="sweep",
        name="fig4-2",
        sweeps=(
            SweepSpec("uniaxial", (0.5, 4.95), 200),
            SweepSpec("biaxial", (0.6, 3.5), 200),
            SweepSpec("shear", (0.0, 4.68), 200),
        ),
    )
    lib["fig4-3"] = RunConfig(
        model=_KILIAN5, reference=_NH, command="path", name="fig4-3",
        path=PathSpec("cube", (1.001, 4.85), 400, (0.0, 5.0), 11),
    )
    lib["fig4-4"] = RunConfig(
        model=_KILIAN5, reference=_NH, command="path", name="fig4-4",
        path=PathSpec("block", (0.25, 4.89), 400, (0.0, 5.0), 11),
    )
    lib["fig5-1"] = RunConfig(
        model=_KILIAN5, command="fem", name="fig5-1",
        fem=FemSpec("traction", 1000.0, solver={"initial_increment": 0.02, "max_increment": 0.02}),
    )
    lib["fig5-2"] = RunConfig(
        model=_KILIAN5, command="fem", name="fig5-2",
        fem=FemSpec("displacement", 6.0, solver={"initial_increment": 0.02, "max_increment": 0.02}),
    )
    lib["fig5-3"] = RunConfig(
        model=MaterialModel.kilian(3.0), command="fem", name="fig5-3",
        fem=FemSpec("strip", 10.0, solver={"initial_increment": 0.02, "max_increment": 0.02}),
    )
    return lib


CASES = _case_library()

CASE_DESCRIPTIONS = {
    "fig3-1": "energy surface over in-plane stretches, Kilian a=5 and Gent a=5",
    "fig4-1": "uniaxial, biaxial and shear Cauchy stress, Gent a=5 vs neo-Hookean",
    "fig4-2": "uniaxial, biaxial and shear Cauchy stress, Kilian a=5 vs neo-Hookean",
    "fig4-3": "dead-load cube, trivial and non-trivial branches, Kilian a=5 vs neo-Hookean",
    "fig4-4": "dead-load plane-strain block, Kilian a=5 vs neo-Hookean",
    "fig5-1": "single element under dead-load traction, Kilian a=5",
    "fig5-2": "single element under prescribed displacement, Kilian a=5",
    "fig5-3": "three-element clamped strip with transverse displacement, Kilian a=3",
}


def case(name) -> RunConfig:
    try:
        return CASES[name]
    except KeyError:
        raise ConfigError(f"unknown case {name!r}; known: {', '.join(sorted(CASES))}") from None
