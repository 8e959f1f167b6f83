"""Config-driven runs of catalog or inline problems, with file outputs.

Config files are YAML mappings.  Recognised keys (all optional except
``scenario`` or ``problem``)::

    scenario: EX1_I            # catalog id, or give an inline `problem:`
    problem: {...}             # dims, alpha, beta, gamma, u0, w0, f, exact
    N_list: [10, 20, 30]
    dt: 1.0e-4
    T_final: 1.0
    basis: {center: 0.0, scale: 1.0}   # scalars or per-dimension lists
    nquad_factor: 2.0
    reference_N: 256           # convergence runs without an exact solution
    params: {mu: 0.3333}       # scenario parameters
    snapshots: [0.1, 0.3]
    cross_sections: [{line: diagonal}, {line: x, value: 17}]
    window: [x0, x1, y0, y1]
    grid_points: 201
    energy_every: 10
    outputs: [errors, energy, snapshots, cross_sections]
    out_dir: runs/ex1
    threads: 1
    seed: 0                    # recorded only; the solver is deterministic

Inline problem expressions are evaluated with numpy functions in scope and
the coordinates ``x``, ``y`` and time ``t``.
"""

from __future__ import annotations

import csv
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .diagnostics import (
    ErrorReport,
    display_grid,
    fill_rates,
    h1_distance,
    h1_error,
    l2_error,
    linf_error,
)
from .dvwe import DvweProblem, GeneralSource, assemble, initial_state
from .field import SpectralField, evaluate, evaluate_grid
from .scenarios import CATALOG, Scenario, get_scenario, make_basis
from .ssprk3 import EnergyRecorder, integrate

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "config_from_dict",
    "cross_section_points",
    "parse_config",
    "read_cross_section",
    "read_energy_csv",
    "read_errors_csv",
    "read_manifest",
    "read_snapshot",
    "run",
    "run_convergence",
    "run_wavefield",
    "write_cross_section",
    "write_energy_csv",
    "write_errors_csv",
    "write_manifest",
    "write_snapshot",
]

log = logging.getLogger(__name__)

OUTPUT_KINDS = ("errors", "energy", "snapshots", "cross_sections")


class ConfigError(ValueError):
    """Invalid or unknown configuration key."""


@dataclass
class ScenarioConfig:
    scenario: str | None = None
    problem: dict | None = None
    N_list: list = field(default_factory=list)
    dt: float = 1e-4
    T_final: float = 1.0
    basis: dict = field(default_factory=lambda: {"center": 0.0, "scale": 1.0})
    nquad_factor: float = 2.0
    reference_N: int | None = None
    params: dict = field(default_factory=dict)
    snapshots: list = field(default_factory=list)
    cross_sections: list = field(default_factory=list)
    window: list | None = None
    grid_points: int = 201
    energy_every: int = 10
    outputs: list = field(default_factory=lambda: list(OUTPUT_KINDS))
    out_dir: str = "hermwave-out"
    threads: int = 1
    seed: int = 0

    def resolve_scenario(self) -> Scenario:
        if self.problem is not None:
            return inline_scenario(self.problem)
        return get_scenario(self.scenario)


# key -> (accepted python types, description for messages)
_SCHEMA = {
    "scenario": ((str,), "a catalog id string"),
    "problem": ((dict,), "a mapping"),
    "N_list": ((list,), "a list of integers"),
    "dt": ((int, float), "a positive number"),
    "T_final": ((int, float), "a non-negative number"),
    "basis": ((dict,), "a mapping with center/scale"),
    "nquad_factor": ((int, float), "a number >= 1"),
    "reference_N": ((int,), "an integer"),
    "params": ((dict,), "a mapping"),
    "snapshots": ((list,), "a list of times"),
    "cross_sections": ((list,), "a list of mappings"),
    "window": ((list,), "a list [x0, x1, y0, y1]"),
    "grid_points": ((int,), "an integer >= 2"),
    "energy_every": ((int,), "a positive integer"),
    "outputs": ((list,), f"a list drawn from {OUTPUT_KINDS}"),
    "out_dir": ((str,), "a path string"),
    "threads": ((int,), "a positive integer"),
    "seed": ((int,), "an integer"),
}

_PROBLEM_KEYS = {"dims", "alpha", "beta", "gamma", "u0", "w0", "f", "exact", "description"}


def _type_error(key, value):
    return ConfigError(f"invalid value for '{key}': expected {_SCHEMA[key][1]}, got {value!r}")


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def config_from_dict(raw: dict) -> ScenarioConfig:
    """Validate a raw mapping and fill in scenario defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of keys to values")
    unknown = sorted(set(raw) - set(_SCHEMA))
    if unknown:
        raise ConfigError(f"unknown config key '{unknown[0]}'; allowed keys: {', '.join(_SCHEMA)}")
    for key, value in raw.items():
        types = _SCHEMA[key][0]
        if value is None and key in ("reference_N", "window", "problem", "scenario"):
            continue
        if isinstance(value, bool) or not isinstance(value, types):
            raise _type_error(key, value)
    if raw.get("scenario") is not None and raw.get("problem") is not None:
        raise ConfigError("give either 'scenario' or 'problem', not both")
    if raw.get("scenario") is None and raw.get("problem") is None:
        raise ConfigError("missing key 'scenario' (a catalog id string) or 'problem' (a mapping)")

    if raw.get("scenario") is not None and raw["scenario"].upper() not in CATALOG:
        raise ConfigError(f"invalid value for 'scenario': {raw['scenario']!r} is not one of {', '.join(CATALOG)}")
    if raw.get("problem") is not None:
        bad = sorted(set(raw["problem"]) - _PROBLEM_KEYS)
        if bad:
            raise ConfigError(f"unknown key 'problem.{bad[0]}'; allowed: {', '.join(sorted(_PROBLEM_KEYS))}")
        if raw["problem"].get("dims", 1) not in (1, 2):
            raise ConfigError("invalid value for 'problem.dims': expected 1 or 2")

    cfg = ScenarioConfig()
    if raw.get("scenario") is not None:
        sc = get_scenario(raw["scenario"])
        cfg.scenario = sc.id
        d = dict(sc.defaults)
        center = d.pop("center", 0.0)
        for k, v in d.items():
            setattr(cfg, k, list(v) if isinstance(v, list) else (dict(v) if isinstance(v, dict) else v))
        cfg.basis = {"center": center, "scale": 1.0}
    for k, v in raw.items():
        if k == "basis":
            extra = sorted(set(v) - {"center", "scale"})
            if extra:
                raise ConfigError(f"unknown config key 'basis.{extra[0]}'; allowed: center, scale")
            cfg.basis = {**cfg.basis, **v}
        elif k == "params":
            cfg.params = {**cfg.params, **v}
        elif k != "scenario":
            setattr(cfg, k, v)
    _validate(cfg)
    return cfg


def _validate(cfg: ScenarioConfig):
    if not cfg.N_list or not all(_is_int(n) and n >= 0 for n in cfg.N_list):
        raise _type_error("N_list", cfg.N_list)
    if any(b <= a for a, b in zip(cfg.N_list, cfg.N_list[1:])):
        raise ConfigError(f"invalid value for 'N_list': must be strictly increasing, got {cfg.N_list}")
    if not cfg.dt > 0:
        raise _type_error("dt", cfg.dt)
    if not cfg.T_final >= 0:
        raise _type_error("T_final", cfg.T_final)
    if cfg.nquad_factor < 1:
        raise _type_error("nquad_factor", cfg.nquad_factor)
    if any(not isinstance(t, (int, float)) or isinstance(t, bool) or t < 0 or t > cfg.T_final + 1e-12
           for t in cfg.snapshots):
        raise ConfigError(f"invalid value for 'snapshots': times must lie in [0, T_final={cfg.T_final}], got {cfg.snapshots}")
    for xs in cfg.cross_sections:
        if not isinstance(xs, dict) or xs.get("line") not in ("diagonal", "x", "y"):
            raise ConfigError(f"invalid value for 'cross_sections': expected entries like "
                              f"{{line: diagonal}} or {{line: x, value: 17}}, got {xs!r}")
        if xs["line"] != "diagonal" and not isinstance(xs.get("value"), (int, float)):
            raise ConfigError(f"invalid value for 'cross_sections': line '{xs['line']}' needs a numeric 'value'")
    if cfg.window is not None and (len(cfg.window) != 4 or not all(isinstance(v, (int, float)) for v in cfg.window)):
        raise _type_error("window", cfg.window)
    if cfg.grid_points < 2:
        raise _type_error("grid_points", cfg.grid_points)
    if cfg.energy_every < 1:
        raise _type_error("energy_every", cfg.energy_every)
    if cfg.threads < 1:
        raise _type_error("threads", cfg.threads)
    if any(o not in OUTPUT_KINDS for o in cfg.outputs):
        raise _type_error("outputs", cfg.outputs)
    for key in ("center", "scale"):
        v = cfg.basis.get(key)
        vals = v if isinstance(v, list) else [v]
        if not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in vals):
            raise ConfigError(f"invalid value for 'basis.{key}': expected a number or list of numbers, got {v!r}")
    if any(s <= 0 for s in (cfg.basis["scale"] if isinstance(cfg.basis["scale"], list) else [cfg.basis["scale"]])):
        raise ConfigError("invalid value for 'basis.scale': must be positive")
    if cfg.reference_N is not None and cfg.reference_N <= max(cfg.N_list):
        raise ConfigError(f"invalid value for 'reference_N': must exceed max(N_list)={max(cfg.N_list)}")


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads exponent floats without a dot, such as ``1e-4``."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:\d+\.?\d*|\.\d+)[eE][-+]?\d+$"),
    list("-+0123456789."),
)


def _apply_override(raw: dict, item: str):
    if "=" not in item:
        raise ConfigError(f"override {item!r} must look like key=value")
    key, value = item.split("=", 1)
    parts = key.strip().split(".")
    target = raw
    for p in parts[:-1]:
        target = target.setdefault(p, {})
        if not isinstance(target, dict):
            raise ConfigError(f"cannot override '{key}': '{p}' is not a mapping")
    target[parts[-1]] = yaml.load(value, Loader=_Loader)


def parse_config(path, overrides=()) -> ScenarioConfig:
    """Read a YAML config file, apply ``key=value`` overrides and validate."""
    with open(path) as fh:
        raw = yaml.load(fh, Loader=_Loader) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    for item in overrides:
        _apply_override(raw, item)
    return config_from_dict(raw)


_NAMESPACE = {name: getattr(np, name) for name in (
    "exp", "sin", "cos", "tan", "sqrt", "abs", "log", "pi", "tanh", "cosh", "sinh", "where", "cbrt", "sign")}


def _expr(src: str, args: str):
    code = compile(str(src), f"<expr {src}>", "eval")

    def fn(*vals):
        env = dict(_NAMESPACE)
        env.update(zip(args.split(","), vals))
        return eval(code, {"__builtins__": {}}, env)

    return fn


def inline_scenario(spec: dict) -> Scenario:
    """Scenario from an inline ``problem`` mapping of numbers and expressions."""
    dims = int(spec.get("dims", 1))
    coords = "x" if dims == 1 else "x,y"

    def coeff(v):
        if isinstance(v, (int, float)):
            return float(v)
        from .dvwe import General

        return General(_expr(v, coords))

    def build(basis, dt, T_final, nquad_factor, params):
        f = spec.get("f")
        return DvweProblem(
            basis=basis, dt=dt, T_final=T_final, nquad_factor=nquad_factor,
            alpha=coeff(spec.get("alpha", 1.0)), beta=coeff(spec.get("beta", 1.0)),
            gamma=coeff(spec.get("gamma", 1.0)),
            u0=_expr(spec["u0"], coords) if spec.get("u0") else None,
            w0=_expr(spec["w0"], coords) if spec.get("w0") else None,
            source=GeneralSource(_expr(f, coords + ",t")) if f else None,
        )

    exact = _expr(spec["exact"], coords + ",t") if spec.get("exact") else None
    return Scenario("INLINE", dims, "convergence" if exact else "wavefield",
                    spec.get("description", "inline problem"), build, exact=exact)


def _problem_for(cfg: ScenarioConfig, sc: Scenario, N: int) -> DvweProblem:
    basis = make_basis(sc.dims, N, cfg.basis.get("center", 0.0), cfg.basis.get("scale", 1.0))
    return sc.build(basis, cfg.dt, cfg.T_final, cfg.nquad_factor, cfg.params)


def _solve(cfg, sc, N, observers=()):
    problem = _problem_for(cfg, sc, N)
    system = assemble(problem)
    state = integrate(system, initial_state(problem), problem.dt, problem.T_final, observers)
    return problem, system, state


def _map(cfg, fn, items):
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


# ---------------------------------------------------------------- file formats

def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def _num(s: str):
    return None if s == "" else float(s)


def write_errors_csv(path, reports, with_h1: bool = False):
    cols = ["N", "L2", "L2_rate", "Linf", "Linf_rate"] + (["H1", "H1_rate"] if with_h1 else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in reports:
            row = [str(r.N), _fmt(r.l2_error), _fmt(r.rate_l2), _fmt(r.linf_error), _fmt(r.rate_linf)]
            if with_h1:
                row += [_fmt(r.h1_error), _fmt(r.rate_h1)]
            w.writerow(row)


def read_errors_csv(path) -> list[ErrorReport]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(ErrorReport(
                N=int(row["N"]), l2_error=_num(row["L2"]), linf_error=_num(row["Linf"]),
                h1_error=_num(row["H1"]) if "H1" in row else None,
                rate_l2=_num(row["L2_rate"]), rate_linf=_num(row["Linf_rate"]),
                rate_h1=_num(row["H1_rate"]) if "H1_rate" in row else None))
    return out


def write_energy_csv(path, times, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "energy"])
        for t, e in zip(times, values):
            w.writerow([repr(float(t)), repr(float(e))])


def read_energy_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def write_snapshot(path, values, window, t):
    """Grid matrix with a 4-line header; row ``i`` is ``y_i``, column ``j`` is ``x_j``.

    ``values`` is indexed ``[i_x, i_y]`` as returned by ``evaluate_grid``.
    """
    values = np.asarray(values)
    nx, ny = values.shape
    x0, x1, y0, y1 = window
    header = f"nx {nx}\nny {ny}\nwindow {x0!r} {x1!r} {y0!r} {y1!r}\ntime {float(t)!r}"
    np.savetxt(path, values.T, fmt="%.17g", header=header, comments="")


def read_snapshot(path):
    """Return ``(values[i_x, i_y], window, time)``."""
    with open(path) as fh:
        head = [next(fh).split() for _ in range(4)]
    nx, ny = int(head[0][1]), int(head[1][1])
    window = tuple(float(v) for v in head[2][1:])
    t = float(head[3][1])
    values = np.loadtxt(path, skiprows=4, ndmin=2).reshape(ny, nx).T
    return values, window, t


def write_cross_section(path, s, x, y, u):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "x", "y", "u"])
        for row in zip(s, x, y, u):
            w.writerow([repr(float(v)) for v in row])


def read_cross_section(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return tuple(data[:, k] for k in range(4))


def write_manifest(path, entries: dict):
    with open(path, "w") as fh:
        fh.writelines(f"{k} = {v}\n" for k, v in entries.items())


def read_manifest(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            if line.strip():
                k, v = line.rstrip("\n").split(" = ", 1)
                out[k] = v
    return out


def _at_time(fn, t):
    return lambda *x: fn(*x, t)


def _manifest(cfg: ScenarioConfig, sc: Scenario, extra: dict) -> dict:
    entries = {"hermwave_version": __version__}
    for f in fields(cfg):
        entries[f.name] = repr(getattr(cfg, f.name))
    entries.update(scenario=sc.id, description=sc.description)
    entries["workers"] = repr(cfg.threads)
    entries.update(extra)
    return entries


def _tlabel(t: float) -> str:
    return f"{t:.6g}"


# ---------------------------------------------------------------- runs

def run_convergence(cfg: ScenarioConfig, write: bool = True) -> list[ErrorReport]:
    """Error table over ``cfg.N_list``.

    Scenarios with a closed-form solution report L2 and L-infinity errors
    (and H1 when a gradient is known).  Otherwise a reference run at
    ``cfg.reference_N`` (default ``4 * max(N_list)``) stands in for the
    exact solution, its coefficients are saved, and H1 errors are reported.
    """
    sc = cfg.resolve_scenario()
    out = Path(cfg.out_dir)
    if write:
        out.mkdir(parents=True, exist_ok=True)

    reference = None
    if sc.exact is None:
        ref_N = cfg.reference_N or 4 * max(cfg.N_list)
        log.info("%s: reference run at N=%d", sc.id, ref_N)
        problem, _, state = _solve(cfg, sc, ref_N)
        reference = SpectralField(problem.basis, state.U)
        if write:
            np.savetxt(out / f"reference_N{ref_N}.txt", reference.coeffs, fmt="%.17g")

    def one(N):
        log.info("%s: N=%d", sc.id, N)
        problem, _, state = _solve(cfg, sc, N)
        uN = SpectralField(problem.basis, state.U)
        T = problem.T_final
        if reference is not None:
            d = _pad_difference(reference, uN)
            grid = display_grid(uN)
            linf = float(np.max(np.abs(evaluate(uN, *grid) - evaluate(reference, *grid))))
            return ErrorReport(N, float(np.linalg.norm(d)), linf, h1_distance(uN, reference))
        exact = lambda *x: sc.exact(*x, T)
        grid = _linf_grid(cfg, uN)
        rep = ErrorReport(N, l2_error(uN, exact), linf_error(uN, exact, grid))
        if sc.exact_grad is not None:
            grads = [_at_time(g, T) for g in sc.exact_grad]
            rep.h1_error = h1_error(uN, exact, grads)
        return rep

    reports = fill_rates(_map(cfg, one, cfg.N_list))
    if write:
        if "errors" in cfg.outputs:
            write_errors_csv(out / "errors.csv", reports, with_h1=reports[0].h1_error is not None)
        extra = {"kind": "convergence"}
        if reference is not None:
            extra["reference_N"] = repr(reference.basis[0].degree)
        write_manifest(out / "manifest.txt", _manifest(cfg, sc, extra))
    return reports


def _pad_difference(ref: SpectralField, f: SpectralField) -> np.ndarray:
    d = np.array(ref.coeffs, dtype=float)
    d[tuple(slice(0, s) for s in f.coeffs.shape)] -= f.coeffs
    return d


def _linf_grid(cfg, field):
    if field.dims == 2:
        return display_grid(field, window=cfg.window, n2d=cfg.grid_points)
    return display_grid(field)


def cross_section_points(xs: dict, window, n: int):
    """Sample points ``(s, x, y)`` of a cross-section inside ``window``."""
    x0, x1, y0, y1 = window
    if xs["line"] == "diagonal":
        lo, hi = max(x0, y0), min(x1, y1)
        x = np.linspace(lo, hi, n)
        return x * np.sqrt(2.0), x, x.copy()
    if xs["line"] == "x":
        y = np.linspace(y0, y1, n)
        return y, np.full(n, float(xs["value"])), y
    x = np.linspace(x0, x1, n)
    return x, x, np.full(n, float(xs["value"]))


def _xs_label(xs: dict) -> str:
    return "diag" if xs["line"] == "diagonal" else f"{xs['line']}{float(xs['value']):g}"


@dataclass
class WavefieldResult:
    N: int
    snapshots: dict
    cross_sections: dict
    energy_times: list
    energy_values: list
    final: SpectralField


def run_wavefield(cfg: ScenarioConfig, write: bool = True) -> dict:
    """Time-march each ``N`` in ``cfg.N_list`` and collect snapshots and sections.

    Integration stops exactly at every snapshot time.  Files for degree ``N``
    go to ``<out_dir>/N<N>/``: ``snap_t<time>.txt``, ``xsec_<line>_t<time>.csv``
    and ``energy.csv``.  Returns ``{N: WavefieldResult}``.
    """
    sc = cfg.resolve_scenario()
    if sc.dims != 2:
        raise ConfigError(f"wavefield runs need a 2D scenario, {sc.id} is {sc.dims}D")
    window = cfg.window or _default_window(cfg, sc)
    out = Path(cfg.out_dir)
    stops = sorted(set(float(t) for t in cfg.snapshots) | {float(cfg.T_final)})

    def one(N):
        problem = _problem_for(cfg, sc, N)
        system = assemble(problem)
        state = initial_state(problem)
        rec = EnergyRecorder(system)
        thinned = _Every(rec, cfg.energy_every)
        snaps, sections = {}, {}
        xs_grid = np.linspace(window[0], window[1], cfg.grid_points)
        ys_grid = np.linspace(window[2], window[3], cfg.grid_points)
        for t_stop in stops:
            state = integrate(system, state, problem.dt, t_stop, [thinned])
            if t_stop in [float(t) for t in cfg.snapshots]:
                fld = SpectralField(problem.basis, state.U)
                snaps[t_stop] = evaluate_grid(fld, xs_grid, ys_grid)
                for xs in cfg.cross_sections:
                    s, x, y = cross_section_points(xs, window, cfg.grid_points)
                    sections[(_xs_label(xs), t_stop)] = (s, x, y, evaluate(fld, x, y))
        rec(state, -1)
        res = WavefieldResult(N, snaps, sections, rec.times, rec.values, SpectralField(problem.basis, state.U))
        if write:
            d = out / f"N{N}"
            d.mkdir(parents=True, exist_ok=True)
            if "snapshots" in cfg.outputs:
                for t, vals in snaps.items():
                    write_snapshot(d / f"snap_t{_tlabel(t)}.txt", vals, window, t)
            if "cross_sections" in cfg.outputs:
                for (label, t), cols in sections.items():
                    write_cross_section(d / f"xsec_{label}_t{_tlabel(t)}.csv", *cols)
            if "energy" in cfg.outputs:
                write_energy_csv(d / "energy.csv", rec.times, rec.values)
        return res

    results = dict(zip(cfg.N_list, _map(cfg, one, cfg.N_list)))
    if write:
        out.mkdir(parents=True, exist_ok=True)
        write_manifest(out / "manifest.txt", _manifest(cfg, sc, {"kind": "wavefield", "window": repr(list(window))}))
    return results


class _Every:
    """Forward the first state and then every ``k``-th step to ``obs``.

    Counts steps across several ``integrate`` calls.
    """

    def __init__(self, obs, k):
        self.obs, self.k, self.steps = obs, k, None

    def __call__(self, state, index):
        if index == 0:
            if self.steps is None:
                self.steps = 0
                self.obs(state, 0)
            return
        self.steps += 1
        if self.steps % self.k == 0:
            self.obs(state, self.steps)


def _default_window(cfg, sc):
    center = np.broadcast_to(np.asarray(cfg.basis.get("center", 0.0), dtype=float), (2,))
    return [center[0] - 10.0, center[0] + 10.0, center[1] - 10.0, center[1] + 10.0]


def run(cfg: ScenarioConfig):
    """Dispatch on the scenario kind."""
    sc = cfg.resolve_scenario()
    if sc.kind == "wavefield":
        return run_wavefield(cfg)
    return run_convergence(cfg)
