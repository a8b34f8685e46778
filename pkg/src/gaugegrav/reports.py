"""Structured verdict records shared by the modules and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field

from .symexpr import NONZERO, PROVEN, ZeroVerdict


def exact_str(v) -> str:
    return str(v)


def number(v) -> dict:
    """JSON form of a number: exact string plus a float approximation."""
    try:
        f = float(v)
    except (TypeError, ValueError):
        f = None
    return {"exact": exact_str(v), "float": f}


@dataclass
class Check:
    name: str
    verdict: ZeroVerdict
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict.status != NONZERO

    def as_dict(self) -> dict:
        v = self.verdict
        out = {"name": self.name, "status": v.status, "samples": v.samples}
        if v.status == NONZERO:
            out["label"] = v.label
            out["value"] = number(v.value)
            out["witness"] = {k: exact_str(x) for k, x in sorted((v.witness or {}).items())}
        if self.detail:
            out["detail"] = self.detail
        return out

    def line(self) -> str:
        return f"{self.name}: {self.verdict}"


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)

    def add(self, name: str, verdict: ZeroVerdict, **detail) -> Check:
        c = Check(name, verdict, detail)
        self.checks.append(c)
        return c

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def proven(self) -> bool:
        return all(c.verdict.status == PROVEN for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {"title": self.title, "ok": self.ok, "checks": [c.as_dict() for c in self.checks]}

    def lines(self) -> list[str]:
        return [f"[{self.title}]"] + ["  " + c.line() for c in self.checks]

    def __str__(self):
        return "\n".join(self.lines())
