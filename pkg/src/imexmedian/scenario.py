"""
Scenario files and the experiment runner behind the CLI.

A scenario is a TOML document::

    name = "fig1"
    method = "imex"                  # imex | explicit | both
    k = 10.0
    t_s = 0.05                       # required for explicit/both
    observations = [0.0, 1.0, 100.0]

    [graph]
    kind = "complete"                # complete | ring | star | path | edges
    n_agents = 3
    weight = 1.0
    # edges = [[1, 2, 1.0], [2, 3, 1.0]]   (kind = "edges", 1-based)

    [initial]
    values = [0.0, 1.0, 1.5]
    # mode = "uniform-random", seed = 0, low = -10.0, high = 10.0

    [solver]                         # all optional
    max_iters = 10000
    convergence_tol = 1e-12
    divergence_threshold = 1e8
    tail_fraction = 0.25
    band = 0.1

    [sweep]                          # optional
    k = [5, 10, 20]
    t_s = [0.01, 0.05]

    [output]                         # optional
    dir = "runs/fig1"
    plot = false

Agents are 1-based in the file and 0-based once parsed.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import GraphError, ParseError, TrajectoryTooShort, ValidationError
from .explicit import ExplicitConfig, run_explicit
from .graph import Graph, build_graph, complete_graph, path_graph, ring_graph, star_graph
from .imex import ImexConfig, run_imex
from .median import ObservationSet, median_set
from .metrics import compute_metrics, theorem1_check
from .spectral import contraction_constants

__all__ = [
    "Scenario",
    "RunSpec",
    "ScenarioResult",
    "BUNDLED",
    "parse_scenario",
    "load_scenario",
    "parse_graph_spec",
    "run_scenario",
    "metrics_columns",
]

BUNDLED = ("fig1", "fig2", "fig2-unstable", "fig3")
METHODS = ("imex", "explicit", "both")
GRAPH_KINDS = ("complete", "ring", "star", "path", "edges")

_TOP_KEYS = {"name", "method", "k", "t_s", "observations", "graph", "initial", "solver", "sweep", "output"}
_SECTION_KEYS = {
    "graph": {"kind", "n_agents", "weight", "edges"},
    "initial": {"values", "mode", "seed", "low", "high"},
    "solver": {"max_iters", "convergence_tol", "divergence_threshold", "tail_fraction", "band"},
    "sweep": {"k", "t_s"},
    "output": {"dir", "plot"},
}


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    graph: Graph
    graph_spec: dict
    observations: ObservationSet
    x0: np.ndarray
    method: str
    k: float
    t_s: Optional[float] = None
    max_iters: int = 10000
    convergence_tol: float = 1e-12
    divergence_threshold: Optional[float] = None
    tail_fraction: float = 0.25
    band: float = 0.1
    sweep_k: tuple = ()
    sweep_t_s: tuple = ()
    output_dir: Optional[str] = None
    plot: bool = False
    initial_spec: Optional[dict] = None

    @property
    def n_agents(self) -> int:
        return self.graph.n_agents

    def with_seed(self, seed: int) -> "Scenario":
        """Redraw a ``uniform-random`` initial state with another seed."""
        if not self.initial_spec or self.initial_spec.get("mode") != "uniform-random":
            return self
        spec = dict(self.initial_spec, seed=int(seed))
        return replace(self, x0=_draw_initial(spec, self.n_agents), initial_spec=spec)


# -- parsing ------------------------------------------------------------------

def _number(value, fieldname, positive=False, nonnegative=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(fieldname, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(fieldname, "must be finite")
    if positive and not value > 0:
        raise ValidationError(fieldname, "must be positive")
    if nonnegative and value < 0:
        raise ValidationError(fieldname, "must be nonnegative")
    return value


def _integer(value, fieldname, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(fieldname, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValidationError(fieldname, f"must be at least {minimum}")
    return value


def _vector(value, fieldname):
    if not isinstance(value, list) or not value:
        raise ValidationError(fieldname, "expected a non-empty list of numbers")
    return np.array([_number(v, f"{fieldname}[{i}]") for i, v in enumerate(value)])


def _section(doc, name):
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ValidationError(name, "expected a table")
    unknown = set(sec) - _SECTION_KEYS[name]
    if unknown:
        raise ValidationError(f"{name}.{sorted(unknown)[0]}", "unknown key")
    return sec


def _build_graph(spec: dict) -> Graph:
    kind = spec.get("kind")
    if kind not in GRAPH_KINDS:
        raise ValidationError("graph.kind", f"expected one of {', '.join(GRAPH_KINDS)}, got {kind!r}")
    n = _integer(spec.get("n_agents"), "graph.n_agents", minimum=1)
    try:
        if kind == "edges":
            if "weight" in spec:
                raise ValidationError("graph.weight", "not used with kind = 'edges'")
            raw = spec.get("edges")
            if not isinstance(raw, list):
                raise ValidationError("graph.edges", "expected a list of [i, j, weight]")
            edges = []
            for idx, e in enumerate(raw):
                if not isinstance(e, list) or len(e) not in (2, 3):
                    raise ValidationError(f"graph.edges[{idx}]", "expected [i, j] or [i, j, weight]")
                i = _integer(e[0], f"graph.edges[{idx}][0]")
                j = _integer(e[1], f"graph.edges[{idx}][1]")
                wt = _number(e[2], f"graph.edges[{idx}][2]") if len(e) == 3 else 1.0
                edges.append((i, j, wt))
            return build_graph(n, edges)
        if "edges" in spec:
            raise ValidationError("graph.edges", f"not used with kind = {kind!r}")
        weight = _number(spec.get("weight", 1.0), "graph.weight", positive=True)
        builder = {"complete": complete_graph, "ring": ring_graph, "star": star_graph, "path": path_graph}[kind]
        return builder(n, weight)
    except GraphError as exc:
        raise ValidationError("graph", str(exc)) from exc


def _draw_initial(spec: dict, n: int) -> np.ndarray:
    rng = np.random.default_rng(spec["seed"])
    return rng.uniform(spec["low"], spec["high"], n)


def _initial(sec: dict, n: int):
    if "values" in sec:
        if set(sec) - {"values"}:
            raise ValidationError("initial", "give either values or mode, not both")
        x0 = _vector(sec["values"], "initial.values")
        if x0.size != n:
            raise ValidationError("initial.values", f"has {x0.size} entries for {n} agents")
        return x0, None
    mode = sec.get("mode")
    if mode != "uniform-random":
        raise ValidationError("initial", "expected values = [...] or mode = 'uniform-random'")
    spec = {
        "mode": mode,
        "seed": _integer(sec.get("seed", 0), "initial.seed", minimum=0),
        "low": _number(sec.get("low", -10.0), "initial.low"),
        "high": _number(sec.get("high", 10.0), "initial.high"),
    }
    if spec["high"] < spec["low"]:
        raise ValidationError("initial.high", "must not be below initial.low")
    return _draw_initial(spec, n), spec


def parse_scenario(text: str, name: Optional[str] = None) -> Scenario:
    """
    Parse and validate scenario text.

    Raises
    ------
    ParseError
        Malformed TOML; ``line`` carries the offending line.
    ValidationError
        A field is missing, of the wrong type or inconsistent.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        msg = str(exc)
        raise ParseError(msg.split(" (at line")[0], getattr(exc, "lineno", None)) from exc

    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ValidationError(sorted(unknown)[0], "unknown key")
    graph_sec = _section(doc, "graph")
    initial_sec = _section(doc, "initial")
    solver = _section(doc, "solver")
    sweep = _section(doc, "sweep")
    output = _section(doc, "output")

    scen_name = doc.get("name", name or "scenario")
    if not isinstance(scen_name, str) or not scen_name:
        raise ValidationError("name", "expected a non-empty string")
    method = doc.get("method", "imex")
    if method not in METHODS:
        raise ValidationError("method", f"expected one of {', '.join(METHODS)}, got {method!r}")
    if "k" not in doc:
        raise ValidationError("k", "missing coupling gain")
    k = _number(doc["k"], "k", positive=True)
    t_s = None
    if "t_s" in doc:
        t_s = _number(doc["t_s"], "t_s", nonnegative=True)
    sweep_t_s = tuple(_number(v, "sweep.t_s", nonnegative=True) for v in sweep.get("t_s", []))
    if method in ("explicit", "both") and t_s is None and not sweep_t_s:
        raise ValidationError("t_s", f"required for method {method!r}")
    sweep_k = tuple(_number(v, "sweep.k", positive=True) for v in sweep.get("k", []))

    if not graph_sec:
        raise ValidationError("graph", "missing [graph] section")
    graph = _build_graph(graph_sec)
    if "observations" not in doc:
        raise ValidationError("observations", "missing")
    obs = _vector(doc["observations"], "observations")
    if obs.size != graph.n_agents:
        raise ValidationError("observations", f"has {obs.size} entries for {graph.n_agents} agents")
    if not initial_sec:
        raise ValidationError("initial", "missing [initial] section")
    x0, initial_spec = _initial(initial_sec, graph.n_agents)

    tail_fraction = _number(solver.get("tail_fraction", 0.25), "solver.tail_fraction", positive=True)
    if tail_fraction > 0.5:
        raise ValidationError("solver.tail_fraction", "must be at most 0.5")
    div = solver.get("divergence_threshold")
    out_dir = output.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ValidationError("output.dir", "expected a string")
    plot = output.get("plot", False)
    if not isinstance(plot, bool):
        raise ValidationError("output.plot", "expected true or false")

    return Scenario(
        name=scen_name,
        graph=graph,
        graph_spec=dict(graph_sec),
        observations=ObservationSet(obs),
        x0=x0,
        method=method,
        k=k,
        t_s=t_s,
        max_iters=_integer(solver.get("max_iters", 10000), "solver.max_iters", minimum=1),
        convergence_tol=_number(solver.get("convergence_tol", 1e-12), "solver.convergence_tol", nonnegative=True),
        divergence_threshold=None if div is None else _number(div, "solver.divergence_threshold", positive=True),
        tail_fraction=tail_fraction,
        band=_number(solver.get("band", 0.1), "solver.band", nonnegative=True),
        sweep_k=sweep_k,
        sweep_t_s=sweep_t_s,
        output_dir=out_dir,
        plot=plot,
        initial_spec=initial_spec,
    )


def load_scenario(ref) -> Scenario:
    """Load a bundled scenario by name, or a scenario file by path."""
    ref = str(ref)
    if ref in BUNDLED:
        text = resources.files("imexmedian").joinpath("scenarios", f"{ref}.toml").read_text(encoding="utf-8")
        return parse_scenario(text, name=ref)
    path = Path(ref)
    return parse_scenario(path.read_text(encoding="utf-8"), name=path.stem)


def parse_graph_spec(spec: str) -> Graph:
    """
    Graph from a compact string: ``complete:3``, ``ring:6:0.5``, ``star:4``,
    ``path:5`` or ``edges:4:1-2,2-3:0.5,3-4`` (1-based, optional ``:weight``
    per edge).
    """
    kind, _, rest = spec.partition(":")
    try:
        if kind == "edges":
            n_text, _, edge_text = rest.partition(":")
            edges = []
            for item in filter(None, edge_text.split(",")):
                pair, _, wt = item.partition(":")
                i, j = pair.split("-")
                edges.append((int(i), int(j), float(wt) if wt else 1.0))
            return build_graph(int(n_text), edges)
        builder = {"complete": complete_graph, "ring": ring_graph, "star": star_graph, "path": path_graph}[kind]
        parts = rest.split(":")
        weight = float(parts[1]) if len(parts) > 1 else 1.0
        return builder(int(parts[0]), weight)
    except (KeyError, ValueError, IndexError) as exc:
        if isinstance(exc, GraphError):
            raise ValidationError("graph", str(exc)) from exc
        raise ValidationError("graph", f"cannot parse graph spec {spec!r}") from exc


# -- running ------------------------------------------------------------------

@dataclass(frozen=True)
class RunSpec:
    method: str
    k: float
    t_s: Optional[float]
    label: str


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _run_specs(s: Scenario, sweep: bool) -> list:
    methods = ("imex", "explicit") if s.method == "both" else (s.method,)
    ks = s.sweep_k if (sweep and s.sweep_k) else (s.k,)
    tss = s.sweep_t_s if (sweep and s.sweep_t_s) else (s.t_s,)
    specs = []
    for method in methods:
        if method == "imex":
            for k in ks:
                label = f"imex_k={k:g}" if len(ks) > 1 else "imex"
                specs.append(RunSpec("imex", k, None, label))
        else:
            for k, t_s in itertools.product(ks, tss):
                if len(ks) > 1 or len(tss) > 1:
                    label = f"explicit_k={k:g}_ts={t_s:g}"
                else:
                    label = "explicit"
                specs.append(RunSpec("explicit", k, t_s, label))
    return specs


def metrics_columns(n_agents: int) -> list:
    """Fixed column order of ``metrics.csv``."""
    per_agent = [
        f"{name}_{i}"
        for name in ("final_dist", "sup_tail_dist", "chattering_index", "steady_state_amplitude")
        for i in range(1, n_agents + 1)
    ]
    return [
        "label", "method", "k", "t_s", "n_agents", "n_steps", "converged", "converged_at",
        "diverged", "iters_to_band", "band", "tail_length", "disagreement_norm",
        "max_final_dist", "max_sup_tail_dist", "max_chattering_index",
        "max_steady_state_amplitude", *per_agent,
        "C_k", "q_k", "C_inf", "q_inf", "error_bound", "explicit_ts_threshold",
        "theorem_allowed", "theorem_pass",
    ]


def trajectory_columns(n_agents: int, with_drives: bool) -> list:
    cols = ["step", *(f"x_{i}" for i in range(1, n_agents + 1)), "avg"]
    if with_drives:
        cols += [f"shat_{i}" for i in range(1, n_agents + 1)]
    return cols


def _trajectory_csv(traj) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    with_drives = traj.drives is not None
    writer.writerow(trajectory_columns(traj.n_agents, with_drives))
    for n, (x, avg) in enumerate(zip(traj.states, traj.averaged)):
        row = [n, *(_fmt(v) for v in x), _fmt(avg)]
        if with_drives:
            # drives[n] acts on the transition out of X[n]; the last state has none
            row += [int(v) for v in traj.drives[n]] if n < traj.n_steps else [""] * traj.n_agents
        writer.writerow(row)
    return buf.getvalue()


def _plot(traj, path: Path, title: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    for i in range(traj.n_agents):
        ax.plot(traj.states[:, i], lw=1, label=f"x_{i + 1}")
    ax.set_xlabel("n")
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def _execute(args):
    """Run one spec; writes its trajectory file and returns a metrics row."""
    s, spec, out_dir = args
    g, obs = s.graph, s.observations
    if spec.method == "imex":
        cfg = ImexConfig(spec.k, s.max_iters, s.convergence_tol, settle_tail=s.tail_fraction)
        traj = run_imex(g, obs, cfg, s.x0)
    else:
        cfg = ExplicitConfig(
            spec.k, spec.t_s, s.max_iters, s.convergence_tol,
            divergence_threshold=s.divergence_threshold, settle_tail=s.tail_fraction,
        )
        traj = run_explicit(g, obs, cfg, s.x0)

    rep = contraction_constants(g, spec.k)
    row = dict.fromkeys(metrics_columns(g.n_agents))
    row.update(
        label=spec.label, method=spec.method, k=spec.k, t_s=spec.t_s, n_agents=g.n_agents,
        n_steps=traj.n_steps, converged=traj.converged, converged_at=traj.converged_at,
        diverged=traj.diverged, band=s.band,
        C_k=rep.c_k, q_k=rep.q_k, C_inf=rep.c_inf, q_inf=rep.q_inf,
        error_bound=rep.error_bound, explicit_ts_threshold=rep.explicit_ts_threshold,
    )
    try:
        met = compute_metrics(traj, g, obs, spec.k, s.tail_fraction, s.band)
    except TrajectoryTooShort:
        met = None
    if met is not None:
        row.update(
            iters_to_band=met.iters_to_band, tail_length=met.tail_length,
            disagreement_norm=met.disagreement_norm,
            max_final_dist=met.final_dist_to_median.max(),
            max_sup_tail_dist=met.sup_tail_dist.max(),
            max_chattering_index=met.chattering_index.max(),
            max_steady_state_amplitude=met.steady_state_amplitude.max(),
        )
        for name, arr in (
            ("final_dist", met.final_dist_to_median), ("sup_tail_dist", met.sup_tail_dist),
            ("chattering_index", met.chattering_index),
            ("steady_state_amplitude", met.steady_state_amplitude),
        ):
            for i, v in enumerate(arr, start=1):
                row[f"{name}_{i}"] = v
        if spec.method == "imex":
            chk = theorem1_check(traj, g, obs, spec.k, s.tail_fraction)
            row.update(theorem_allowed=chk.allowed, theorem_pass=chk.passed)

    if out_dir is not None:
        stem = out_dir / f"trajectory_{spec.label}"
        stem.with_suffix(".csv").write_text(_trajectory_csv(traj), encoding="utf-8")
        if s.plot:
            _plot(traj, stem.with_suffix(".png"), f"{s.name} [{spec.label}]")
    return row


@dataclass
class ScenarioResult:
    scenario: Scenario
    rows: list
    summary: str
    exit_status: int
    output_dir: Optional[Path]

    def row(self, label: str) -> dict:
        for r in self.rows:
            if r["label"] == label:
                return r
        raise KeyError(label)


def _metrics_csv(rows, n_agents) -> str:
    buf = io.StringIO()
    cols = metrics_columns(n_agents)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def _short(v):
    return "n/a" if v is None else f"{v:.6g}"


def _summary(s: Scenario, rows) -> str:
    m = median_set(s.observations)
    lines = [
        f"scenario {s.name}: {s.n_agents} agents, median set [{m.lo:g}, {m.hi:g}]",
    ]
    for r in rows:
        head = f"[{r['label']}] k={r['k']:g}"
        if r["method"] == "explicit":
            head += f" t_s={r['t_s']:g} (linear stability limit {r['explicit_ts_threshold']:.6g})"
        if r["diverged"]:
            status = f"diverged = true after {r['n_steps']} steps"
        elif r["converged"]:
            status = f"converged at n={r['converged_at']} ({r['n_steps']} steps recorded)"
        else:
            status = f"not converged after {r['n_steps']} steps"
        lines.append(f"{head}: {status}")
        lines.append(
            f"  chattering_index {_short(r['max_chattering_index'])}, "
            f"steady_state_amplitude {_short(r['max_steady_state_amplitude'])}, "
            f"max tail distance {_short(r['max_sup_tail_dist'])}, "
            f"iterations to band {s.band:g}: {r['iters_to_band'] if r['iters_to_band'] is not None else 'never'}"
        )
        if r["theorem_pass"] is not None:
            verdict = "PASS" if r["theorem_pass"] else "FAIL"
            lines.append(
                f"  theorem check {verdict}: max tail distance {_short(r['max_sup_tail_dist'])}"
                f" <= allowed {_short(r['theorem_allowed'])}"
            )
    if s.method == "both":
        def key(r):
            chat = r["max_chattering_index"]
            band = r["iters_to_band"]
            return (
                bool(r["diverged"]),
                math.inf if chat is None else chat,
                math.inf if band is None else band,
            )
        order = sorted(rows, key=key)
        lines.append("ranking (chattering_index, then iterations to band): " + " < ".join(r["label"] for r in order))
    return "\n".join(lines) + "\n"


def run_scenario(s: Scenario, out_dir=None, sweep=False, jobs=1, strict=False) -> ScenarioResult:
    """
    Run every solver configuration of a scenario.

    Writes ``trajectory_<label>.csv`` per run, ``metrics.csv`` and
    ``summary.txt`` into `out_dir` (falling back to the scenario's
    ``output.dir``; nothing is written when both are unset). With
    ``sweep=True`` the ``[sweep]`` lists replace `k` and `t_s`. The exit
    status is 1 when `strict` is set and an IMEX theorem check fails.
    """
    target = out_dir if out_dir is not None else s.output_dir
    target = Path(target) if target is not None else None
    if target is not None:
        target.mkdir(parents=True, exist_ok=True)
    specs = _run_specs(s, sweep)
    work = [(s, spec, target) for spec in specs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(work), os.cpu_count() or 1)) as pool:
            rows = list(pool.map(_execute, work))
    else:
        rows = [_execute(w) for w in work]

    summary = _summary(s, rows)
    if target is not None:
        (target / "metrics.csv").write_text(_metrics_csv(rows, s.n_agents), encoding="utf-8")
        (target / "summary.txt").write_text(summary, encoding="utf-8")
    failed = any(r["theorem_pass"] is False for r in rows)
    return ScenarioResult(s, rows, summary, 1 if (strict and failed) else 0, target)
