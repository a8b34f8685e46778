"""Zero testing: exact when the canonical form decides, sampling otherwise."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from .core import DomainError, ScalarExpr, as_expr

PROVEN = "proven-zero"
PROBABLE = "probably-zero"
NONZERO = "nonzero"

DEFAULT_SAMPLES = 32


class EvaluationDomainError(RuntimeError):
    """No admissible sample point was found within the attempt budget."""


@dataclass(frozen=True)
class ZeroVerdict:
    status: str
    samples: int = 0
    witness: Mapping[str, object] | None = None
    value: object = None
    label: str | None = None

    @property
    def is_zero(self) -> bool:
        return self.status != NONZERO

    @property
    def proven(self) -> bool:
        return self.status == PROVEN

    def __bool__(self):
        return self.is_zero

    def __str__(self):
        if self.status == PROBABLE:
            return f"probably-zero({self.samples})"
        if self.status == NONZERO:
            pt = ", ".join(f"{k}={v}" for k, v in sorted((self.witness or {}).items()))
            where = f" [{self.label}]" if self.label else ""
            return f"nonzero{where} at ({pt}) value {self.value}"
        return self.status


def random_rational(rng: random.Random, span: int = 9, den: int = 7):
    """A nonzero rational with small numerator and denominator."""
    while True:
        p = rng.randint(-span, span)
        if p:
            return mpq(p, rng.randint(1, den))


def default_sampler(symbols: list[str]):
    """Sampler drawing independent small rationals for every symbol."""

    def draw(rng: random.Random) -> dict:
        return {s: random_rational(rng) for s in symbols}

    return draw


def _first_point(symbols: list[str]) -> dict:
    return {s: mpq(i + 1) for i, s in enumerate(symbols)}


def _is_small(e: ScalarExpr, point, rel_tol: float):
    """(value, small?) for an expression at a point; float path when inexact."""
    val = e.evaluate(point)
    if isinstance(val, float):
        fv, mag = e.evaluate_with_magnitude(point)
        scale = max(mag, 1e-300)
        if abs(fv) <= rel_tol * scale:
            return val, True
        if abs(fv) > 1e-4 * scale:
            return val, False
        # borderline cancellation: settle it at high precision
        mv, mmag = e.evaluate_mp(point)
        return val, abs(mv) <= 1e-40 * max(mmag, 1e-300)
    return val, val == 0


class PointStream:
    """Deterministic stream of sample points shared by several checks.

    Drawing the same points for every component of a tensor keeps reports
    reproducible and lets expensive per-point data be cached by callers.
    """

    def __init__(self, symbols: Iterable[str], seed: int = 0, sampler: Callable | None = None,
                 deterministic_first: bool = True):
        self.symbols = sorted(set(symbols))
        self.rng = random.Random(seed)
        self.sampler = sampler or default_sampler(self.symbols)
        self.deterministic_first = deterministic_first and sampler is None
        self._points: list[dict] = []

    def point(self, i: int) -> dict:
        while len(self._points) <= i:
            if not self._points and self.deterministic_first:
                self._points.append(_first_point(self.symbols))
            else:
                self._points.append(self.sampler(self.rng))
        return self._points[i]


def is_zero(e, samples: int = DEFAULT_SAMPLES, seed: int = 0, sampler: Callable | None = None,
            rel_tol: float = 1e-9, max_attempts: int | None = None, label: str | None = None,
            stream: PointStream | None = None) -> ZeroVerdict:
    """Decide whether ``e`` vanishes identically.

    Returns proven-zero when the canonical form is the zero constant.
    Otherwise the expression is sampled at ``samples`` rational points; the first
    point assigns 1, 2, 3, ... to the sorted free symbols.  Points where the
    expression is undefined are skipped.
    """
    e = as_expr(e)
    if not e.num:
        return ZeroVerdict(PROVEN, label=label)
    if e.is_constant():
        return ZeroVerdict(NONZERO, 0, {}, e.constant_value(), label)
    symbols = sorted(e.free_symbols)
    if stream is None:
        stream = PointStream(symbols, seed, sampler)
    if max_attempts is None:
        max_attempts = 20 * samples + 100
    good = 0
    i = 0
    while good < samples and i < max_attempts:
        point = stream.point(i)
        i += 1
        try:
            val, small = _is_small(e, point, rel_tol)
        except (DomainError, ZeroDivisionError, ValueError, OverflowError):
            continue
        if not small:
            return ZeroVerdict(NONZERO, good + 1, {s: point[s] for s in symbols}, val, label)
        good += 1
    if good == 0:
        raise EvaluationDomainError(f"no admissible sample point in {max_attempts} attempts")
    return ZeroVerdict(PROBABLE, good, label=label)


def combine(verdicts: Iterable[ZeroVerdict]) -> ZeroVerdict:
    """Weakest verdict of a family: any nonzero wins, else probable beats proven."""
    best = ZeroVerdict(PROVEN)
    for v in verdicts:
        if v.status == NONZERO:
            return v
        if v.status == PROBABLE and (best.status == PROVEN or v.samples < best.samples):
            best = v
    return best


def all_zero(exprs, samples: int = DEFAULT_SAMPLES, seed: int = 0, sampler=None, labels=None,
             rel_tol: float = 1e-9) -> ZeroVerdict:
    """Zero-test a family of expressions against one shared point stream."""
    exprs = [as_expr(x) for x in exprs]
    if labels is None:
        labels = [str(i) for i in range(len(exprs))]
    syms = set()
    for x in exprs:
        syms |= x.free_symbols
    stream = PointStream(syms, seed, sampler)
    out = []
    for lab, x in zip(labels, exprs):
        v = is_zero(x, samples, seed, sampler, rel_tol, label=lab, stream=stream)
        if v.status == NONZERO:
            return v
        out.append(v)
    return combine(out)
