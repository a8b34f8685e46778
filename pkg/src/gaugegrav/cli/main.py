"""Command-line front end: ``run`` a scenario or ``selfcheck`` the build."""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..geometry import Chart, MetricField, WorldConnection, decompose, recompose
from ..reports import Report
from ..symexpr import PROVEN, ZeroVerdict, parse
from . import tasks as T
from .scenario import Scenario, ScenarioError, load, parse_scenario

DEFAULT_SEED = 20240601
DEFAULT_SAMPLES = 32


@dataclass
class TaskRecord:
    index: int
    op: str
    args: tuple
    status: str  # "ok", "failed" or "error"
    value: dict | None = None
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    error: str | None = None
    seconds: float = 0.0
    result_object: object = field(default=None, repr=False, compare=False)

    def as_dict(self, timing: bool) -> dict:
        out = {"task": self.index, "op": self.op, "args": list(self.args), "status": self.status}
        if self.value is not None:
            out["result"] = self.value
        if self.checks:
            out["checks"] = [c.as_dict() for c in self.checks]
        if self.info:
            out["info"] = {k: _jsonable(v) for k, v in self.info.items()}
        if self.error:
            out["error"] = self.error
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out

    def lines(self, timing: bool) -> list[str]:
        head = f"task {self.index}: {self.op}({', '.join(self.args)}) [{self.status}]"
        if timing:
            head += f" {self.seconds:.3f}s"
        out = [head]
        if self.error:
            out.append(f"  error: {self.error}")
        if self.value is not None:
            out += ["  " + s for s in _value_lines(self.value)]
        for k, v in self.info.items():
            out.append(f"  {k} = {v}")
        out += ["  " + c.line() for c in self.checks]
        return out


def _jsonable(v):
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


def _value_lines(v: dict) -> list[str]:
    kind = v.get("kind")
    if "components" in v:
        comps = v["components"]
        if not comps:
            return [f"{kind}: all components zero"]
        out = [f"{kind}:"]
        for idx, e in comps.items():
            if isinstance(e, dict):
                e = f"{e['re']} + i*({e['im']})"
            out.append(f"  [{idx}] = {e}")
        return out
    if "expr" in v:
        return [f"{kind} = {v['expr']}"]
    if "fields" in v:
        return [f"{k} = {x['exact'] if isinstance(x, dict) else x}" for k, x in v["fields"].items()]
    return [f"{kind}: {v.get('repr')}"]


@dataclass
class RunReport:
    records: list
    seed: int
    samples: int

    @property
    def exit_code(self) -> int:
        return 0 if all(r.status == "ok" for r in self.records) else 1

    def as_dict(self, timing: bool = False) -> dict:
        return {"seed": self.seed, "samples": self.samples, "ok": self.exit_code == 0,
                "tasks": [r.as_dict(timing) for r in self.records]}

    def text(self, timing: bool = False) -> str:
        lines = [f"seed {self.seed}, samples {self.samples}, {len(self.records)} task(s)"]
        for r in self.records:
            lines += r.lines(timing)
        ok = sum(r.status == "ok" for r in self.records)
        lines.append(f"{ok}/{len(self.records)} task(s) ok")
        return "\n".join(lines) + "\n"

    def json(self, timing: bool = False) -> str:
        return json.dumps(self.as_dict(timing), indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# run
# --------------------------------------------------------------------------


def _execute(sc: Scenario, task, seed: int, samples: int, resolve) -> TaskRecord:
    t0 = time.perf_counter()
    rec = TaskRecord(task.index, task.op, task.args, "ok")
    try:
        if task.op not in T.OPS:
            raise T.TaskError(f"unknown operation {task.op!r}")
        kinds, fn = T.OPS[task.op]
        if len(task.args) != len(kinds):
            raise T.TaskError(f"{task.op} takes {len(kinds)} argument(s), got {len(task.args)}")
        objs = []
        for name, want in zip(task.args, kinds):
            obj = resolve(name)
            got = T.kind_of(obj)
            if got != want:
                raise T.TaskError(f"object type mismatch: {name} is a {got}, {task.op} expects a {want}")
            objs.append(obj)
        opts = dict(task.options)
        t_samples = T._int(opts, "samples", samples)
        t_seed = T._int(opts, "seed", seed + task.index)
        out = fn(*objs, samples=t_samples, seed=t_seed, options=opts)
        rec.value = T.render_value(out.value)
        rec.info = out.info
        rec.checks = list(out.report.checks)
        expect = opts.get("expect")
        if expect is not None:
            if expect != "zero":
                raise T.TaskError(f"unknown expectation {expect!r}")
            chart = getattr(out.value, "chart", sc.chart)
            v = T.zero_verdict(chart, T.components_of(out.value), t_samples, t_seed)
            rec.checks.append(Report("").add("expect zero", v))
        if any(not c.ok for c in rec.checks):
            rec.status = "failed"
        rec.result_object = out.value
    except Exception as exc:  # reported per task; the run continues
        rec.status = "error"
        rec.error = f"{type(exc).__name__}: {exc}"
        rec.result_object = None
    rec.seconds = time.perf_counter() - t0
    return rec


def run_scenario(sc: Scenario, seed: int = DEFAULT_SEED, samples: int = DEFAULT_SAMPLES,
                 serial: bool = False, workers: int | None = None) -> RunReport:
    futures: dict = {}

    def resolve(name):
        kind, obj = sc.objects[name]
        if kind != "pending":
            return obj
        rec = futures[obj].result() if not serial else futures[obj]
        if rec.status == "error" or rec.result_object is None:
            raise T.TaskError(f"{name} was not produced by task {obj}")
        return rec.result_object

    if serial or len(sc.tasks) <= 1:
        serial = True
        for task in sc.tasks:
            futures[task.index] = _execute(sc, task, seed, samples, resolve)
        records = [futures[t.index] for t in sc.tasks]
    else:
        # tasks only refer to earlier tasks, and the pool starts them in order,
        # so a task waiting on a dependency never blocks that dependency
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for task in sc.tasks:
                futures[task.index] = pool.submit(_execute, sc, task, seed, samples, resolve)
            records = [futures[t.index].result() for t in sc.tasks]
    return RunReport(records, seed, samples)


def run(path: str, seed: int = DEFAULT_SEED, samples: int = DEFAULT_SAMPLES, serial: bool = False) -> RunReport:
    return run_scenario(load(path), seed, samples, serial)


# --------------------------------------------------------------------------
# selfcheck
# --------------------------------------------------------------------------


def _random_splitting_verdict(seed: int = 7) -> ZeroVerdict:
    """Round trip recompose(decompose(G, g)) = G for a random polynomial pair in dim 3."""
    rng = random.Random(seed)
    chart = Chart(3)
    x = chart.coords

    def poly():
        a, b = rng.randint(-3, 3), rng.randint(1, 4)
        i, j = rng.randrange(3), rng.randrange(3)
        return f"({a}/{b})*{x[i]}*{x[j]} + {rng.randint(-2, 2)}/5*{x[rng.randrange(3)]}"

    g = [["0"] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            e = poly() if i != j else f"{1 if i == 0 else -1}*(1 + {x[i]}^2)"
            g[i][j] = g[j][i] = e
    g = MetricField(chart, [[parse(e) for e in row] for row in g], check=False)
    G = WorldConnection(chart, [[[parse(poly()) for _ in range(3)] for _ in range(3)] for _ in range(3)])
    back = recompose(decompose(G, g), g)
    for idx in np.ndindex(G.components.shape):
        d = back[idx] - G[idx]
        if d.num:
            return T.zero_verdict(chart, [(str(idx), d)], 16, seed)
    return ZeroVerdict(PROVEN)


def selfcheck(gamma=None) -> Report:
    """Built-in suite.  ``gamma`` replaces the gamma basis (negative-control hook)."""
    from .. import brst
    from ..variational import JetContext, hilbert_einstein, invariance_identities, noether_identities

    rep = Report("selfcheck")
    rep.add("splitting round trip (dim 3)", _random_splitting_verdict())
    L = hilbert_einstein(JetContext(2))
    inv = invariance_identities(L, samples=8, seed=1)
    rep.add("momentum antisymmetry (HE, dim 2)", inv["momentum antisymmetry"].verdict)
    rep.add("momentum relation (HE, dim 2)", inv["momentum relation"].verdict)
    noe = noether_identities(L, samples=8, seed=1)
    bad = [c for c in noe.checks if not c.ok]
    rep.add("Noether identities (HE, dim 2)", bad[0].verdict if bad else
            ZeroVerdict(PROVEN if noe.proven else noe.checks[0].verdict.status, 8))
    nil = brst.nilpotency_check(2)
    bad = [c for c in nil.checks if not c.ok]
    rep.add(f"BRST nilpotency (dim 2, {len(nil.checks)} generators)", bad[0].verdict if bad else ZeroVerdict(PROVEN))
    for c in T.clifford_report(gamma).checks:
        rep.add(f"Clifford: {c.name}", c.verdict)
    return rep


def _selfcheck_text(rep: Report) -> str:
    width = max(len(c.name) for c in rep.checks)
    lines = [f"{c.name.ljust(width)}  {'PASS' if c.ok else 'FAIL'}  {c.verdict}" for c in rep.checks]
    lines.append(f"{sum(c.ok for c in rep.checks)}/{len(rep.checks)} passed")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaugegrav", description="Exact gauge-gravity computations.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("file")
    r.add_argument("--out", help="write the report here instead of standard output")
    r.add_argument("--json", action="store_true", help="machine-readable report")
    r.add_argument("--seed", type=int, default=DEFAULT_SEED)
    r.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    r.add_argument("--serial", action="store_true", help="run tasks one after another")
    r.add_argument("--timing", action="store_true", help="include wall times (breaks byte-identity)")
    s = sub.add_parser("selfcheck", help="run the built-in checks")
    s.add_argument("--json", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selfcheck":
        rep = selfcheck()
        sys.stdout.write(json.dumps(rep.as_dict(), indent=2, sort_keys=True, default=str) + "\n"
                         if args.json else _selfcheck_text(rep))
        return 0 if rep.ok else 1
    try:
        sc = load(args.file)
    except OSError as exc:
        sys.stderr.write(f"error: cannot read {args.file}: {exc.strerror}\n")
        return 1
    except ScenarioError as exc:
        sys.stderr.write(f"{args.file}: {exc}\n")
        return 1
    report = run_scenario(sc, args.seed, args.samples, args.serial)
    text = report.json(args.timing) if args.json else report.text(args.timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


__all__ = ["main", "run", "run_scenario", "selfcheck", "parse_scenario", "RunReport", "TaskRecord"]
