"""Line-oriented scenario files.

A scenario is a sequence of sections.  Each section header is ``[kind]`` or
``[kind NAME]``; the body holds ``key = value`` lines.  Blank lines and
lines starting with ``#`` are ignored.

    [chart]
    dim = 4
    coords = t, r, th, ph
    params = m
    domain r = 3, 12

    [metric g]
    diag = 1 - 2*m/r, -1/(1 - 2*m/r), -r^2, -r^2*sin(th)^2

    [task]
    op = scalar_curvature
    args = g
    expect = zero

Component keys are index digits (``01 = x0*x1``); symmetric objects mirror
the keys given.  ``diag`` lists diagonal entries.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..geometry import Chart, MetricField, TensorField, TetradField, WorldConnection
from ..geometry.metric import LORENTZIAN, RIEMANNIAN
from ..lifts import BaseVectorField
from ..spinor import SpinorFieldExpr
from ..symexpr import ZERO, ParseError, UnknownIdentifierError, parse
from ..variational import JetContext, hilbert_einstein, yang_mills
from ..variational.lagrangians import from_text

OBJECT_KINDS = ("metric", "tetrad", "connection", "vectorfield", "oneform", "spinor", "lagrangian")
HEADER_RE = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+([A-Za-z_][A-Za-z0-9_]*))?\s*\]\s*$")


class ScenarioError(ValueError):
    """Malformed scenario; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class Entry:
    key: str
    value: str
    line: int
    column: int  # column where the value starts


@dataclass
class Section:
    kind: str
    name: str | None
    line: int
    entries: list = field(default_factory=list)

    def get(self, key: str, default=None) -> Entry | None:
        for e in self.entries:
            if e.key == key:
                return e
        return default


@dataclass
class Task:
    index: int
    op: str
    args: tuple
    options: dict
    line: int
    result_name: str | None = None


@dataclass
class Scenario:
    chart: Chart | None = None
    objects: dict = field(default_factory=dict)  # name -> (kind, object)
    tasks: list = field(default_factory=list)


def split_top(text: str, sep: str = ",") -> list[tuple[str, int]]:
    """Split at separators outside parentheses; returns (piece, offset) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return [(p.strip(), off + len(p) - len(p.lstrip())) for p, off in out]


def read_sections(text: str) -> list[Section]:
    sections: list[Section] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            m = HEADER_RE.match(stripped)
            if not m:
                raise ScenarioError(f"malformed section header {stripped!r}", no, line.index("[") + 1)
            sections.append(Section(m.group(1).lower(), m.group(2), no))
            continue
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", no, len(line) - len(line.lstrip()) + 1)
        if not sections:
            raise ScenarioError("entry outside any section", no, 1)
        key, value = line.split("=", 1)
        col = len(key) + 2 + (len(value) - len(value.lstrip()))
        sections[-1].entries.append(Entry(key.strip(), value.strip(), no, col))
    return sections


class _Builder:
    def __init__(self):
        self.sc = Scenario()

    # expressions ---------------------------------------------------------

    def expr(self, text: str, line: int, column: int, names=None):
        vars_ = names if names is not None else (self.sc.chart.vars if self.sc.chart else None)
        try:
            return parse(text, vars_)
        except (ParseError, UnknownIdentifierError) as exc:
            msg = str(exc).rsplit(" at byte", 1)[0]
            raise ScenarioError(msg, line, column + _char_offset(text, exc.offset)) from None

    def _need_chart(self, sec: Section) -> Chart:
        if self.sc.chart is None:
            raise ScenarioError(f"[{sec.kind}] before [chart]", sec.line, 1)
        return self.sc.chart

    def components(self, sec: Section, rank: int, symmetric: bool = False) -> np.ndarray:
        chart = self._need_chart(sec)
        n = chart.dim
        out = np.empty((n,) * rank, dtype=object)
        out.fill(ZERO)
        seen = set()
        for e in sec.entries:
            if e.key == "diag":
                if rank != 2:
                    raise ScenarioError("diag needs a rank-2 object", e.line, 1)
                parts = split_top(e.value)
                if len(parts) != n:
                    raise ScenarioError(f"diag needs {n} entries, got {len(parts)}", e.line, e.column)
                for i, (p, off) in enumerate(parts):
                    out[i, i] = self.expr(p, e.line, e.column + off)
                    seen.add((i, i))
                continue
            if e.key in ("signature", "from", "of"):
                continue
            if not (e.key.isdigit() and len(e.key) == rank and all(int(c) < n for c in e.key)):
                raise ScenarioError(f"bad component key {e.key!r}", e.line, 1)
            idx = tuple(int(c) for c in e.key)
            if idx in seen or (symmetric and idx[::-1] in seen and idx[0] != idx[1]):
                raise ScenarioError(f"component {e.key} given twice", e.line, 1)
            seen.add(idx)
            v = self.expr(e.value, e.line, e.column)
            out[idx] = v
            if symmetric:
                out[idx[::-1]] = v
        return out

    # sections ------------------------------------------------------------

    def chart(self, sec: Section):
        if self.sc.chart is not None:
            raise ScenarioError("second [chart] section", sec.line, 1)
        dim, coords, params, domain = 4, None, (), {}
        for e in sec.entries:
            if e.key == "dim":
                try:
                    dim = int(e.value)
                except ValueError:
                    raise ScenarioError(f"dim must be an integer, got {e.value!r}", e.line, e.column) from None
            elif e.key == "coords":
                coords = [p for p, _ in split_top(e.value)]
            elif e.key == "params":
                params = [p for p, _ in split_top(e.value) if p]
            elif e.key.startswith("domain "):
                parts = split_top(e.value)
                if len(parts) != 2:
                    raise ScenarioError("domain needs 'low, high'", e.line, e.column)
                lo, hi = (self.expr(p, e.line, e.column + off, names=()).evaluate({}) for p, off in parts)
                domain[e.key.split(None, 1)[1].strip()] = (lo, hi)
            else:
                raise ScenarioError(f"unknown chart key {e.key!r}", e.line, 1)
        try:
            self.sc.chart = Chart(dim, coords, params, domain)
        except ValueError as exc:
            raise ScenarioError(str(exc), sec.line, 1) from None

    def define(self, sec: Section):
        if not sec.name:
            raise ScenarioError(f"[{sec.kind}] needs a name", sec.line, 1)
        if sec.name in self.sc.objects:
            raise ScenarioError(f"name {sec.name!r} already defined", sec.line, 1)
        chart = self._need_chart(sec)
        try:
            obj = getattr(self, "obj_" + sec.kind)(sec, chart)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(str(exc), sec.line, 1) from None
        self.sc.objects[sec.name] = (sec.kind, obj)

    def obj_metric(self, sec, chart):
        sig = sec.get("signature")
        signature = sig.value.lower() if sig else LORENTZIAN
        if signature not in (LORENTZIAN, RIEMANNIAN):
            raise ScenarioError(f"unknown signature {signature!r}", sig.line, sig.column)
        return MetricField(chart, self.components(sec, 2, symmetric=True), signature=signature)

    def obj_tetrad(self, sec, chart):
        return TetradField(chart, self.components(sec, 2))

    def obj_connection(self, sec, chart):
        return WorldConnection(chart, self.components(sec, 3))

    def obj_vectorfield(self, sec, chart):
        comps = self.components(sec, 1)
        return BaseVectorField(chart, list(comps))

    def obj_oneform(self, sec, chart):
        return TensorField(chart, "l", self.components(sec, 1))

    def obj_spinor(self, sec, chart):
        if chart.dim != 4:
            raise ScenarioError("spinor fields need a four-dimensional chart", sec.line, 1)
        parts = [[ZERO, ZERO] for _ in range(4)]
        for e in sec.entries:
            m = re.fullmatch(r"(re|im)([0-3])", e.key)
            if not m:
                raise ScenarioError(f"bad spinor key {e.key!r}", e.line, 1)
            parts[int(m.group(2))][0 if m.group(1) == "re" else 1] = self.expr(e.value, e.line, e.column)
        return SpinorFieldExpr.from_parts(chart, parts)

    def obj_lagrangian(self, sec, chart):
        d = sec.get("dim")
        dim = int(d.value) if d else chart.dim
        ctx = JetContext(dim)
        b = sec.get("builtin")
        x = sec.get("expr")
        if (b is None) == (x is None):
            raise ScenarioError("lagrangian needs exactly one of 'builtin' or 'expr'", sec.line, 1)
        if b is not None:
            makers = {"hilbert_einstein": hilbert_einstein, "yang_mills": yang_mills}
            if b.value not in makers:
                raise ScenarioError(f"unknown builtin Lagrangian {b.value!r}", b.line, b.column)
            return makers[b.value](ctx)
        try:
            return from_text(ctx, x.value, sec.name)
        except (ParseError, UnknownIdentifierError) as exc:
            raise ScenarioError(str(exc).rsplit(" at byte", 1)[0], x.line,
                                x.column + _char_offset(x.value, exc.offset)) from None

    def task(self, sec: Section):
        op = sec.get("op")
        if op is None:
            raise ScenarioError("task needs 'op'", sec.line, 1)
        args_e = sec.get("args")
        args = tuple(p for p, _ in split_top(args_e.value)) if args_e and args_e.value else ()
        for a in args:
            if a not in self.sc.objects and not _is_literal(a):
                raise ScenarioError(f"unknown object {a!r}", args_e.line, args_e.column + args_e.value.index(a))
        options = {}
        result_name = None
        for e in sec.entries:
            if e.key in ("op", "args"):
                continue
            if e.key == "as":
                result_name = e.value
                if result_name in self.sc.objects:
                    raise ScenarioError(f"name {result_name!r} already defined", e.line, e.column)
                continue
            options[e.key] = e.value
        t = Task(len(self.sc.tasks), op.value, args, options, sec.line, result_name)
        self.sc.tasks.append(t)
        if result_name:
            # placeholder so later tasks can refer to it; resolved at run time
            self.sc.objects[result_name] = ("pending", t.index)


def _char_offset(text: str, byte_offset: int) -> int:
    return len(text.encode("utf-8")[:byte_offset].decode("utf-8", errors="ignore"))


def _is_literal(a: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*=.*|-?\d+", a))


def parse_scenario(text: str) -> Scenario:
    b = _Builder()
    for sec in read_sections(text):
        if sec.kind == "chart":
            b.chart(sec)
        elif sec.kind in OBJECT_KINDS:
            b.define(sec)
        elif sec.kind == "task":
            b.task(sec)
        else:
            raise ScenarioError(f"unknown section [{sec.kind}]", sec.line, 2)
    return b.sc


def load(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
