"""Graded polynomial algebra with anticommuting ghosts, gauge and BRST operators.

Variables are named like the jet variables of ``variational.jets``:

* even: ``s01``, ``s01_2``, ``k012``, ``k012_3``, ``sl01``, ``rs`` and the
  ghost antifield ``cb0`` (ghost number -2);
* odd: ghosts ``c0``, ``c0_1``, ``c0_12`` (ghost number +1) and the
  antifields ``sb01`` (sigma-bar) and ``kb012`` (k-bar), ghost number -1.

A monomial is (even part, odd part): the even part is a sorted tuple of
(name, exponent); the odd part a tuple of distinct names in canonical order.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable

from gmpy2 import mpq

from .reports import Report
from .symexpr import NONZERO, PROVEN, ScalarExpr, ZeroVerdict, as_expr

_VAR_RE = re.compile(r"^(s|k|c|t|sl|rs|sb|kb|cb)(\d*)(?:_(\d+))?$")
_ODD_RANK = {"c": 0, "sb": 1, "kb": 2}
_GHOST = {"c": 1, "sb": -1, "kb": -1, "cb": -2}


class GradedError(ValueError):
    """Malformed graded variable or operation."""


def split(name: str):
    m = _VAR_RE.match(name)
    if not m:
        raise GradedError(f"not a graded variable: {name!r}")
    return m.group(1), tuple(int(c) for c in m.group(2)), tuple(sorted(int(c) for c in (m.group(3) or "")))


def join(kind: str, slots, deriv=()) -> str:
    out = kind + "".join(map(str, slots))
    if deriv:
        out += "_" + "".join(map(str, sorted(deriv)))
    return out


def is_odd(name: str) -> bool:
    return split(name)[0] in _ODD_RANK


def ghost_number_of(name: str) -> int:
    return _GHOST.get(split(name)[0], 0)


def _odd_key(name: str):
    kind, slots, deriv = split(name)
    return (_ODD_RANK[kind], len(deriv), slots, deriv)


def _sort_odd(names: list):
    """(sign, sorted tuple) or (0, None) when a variable repeats."""
    if len(set(names)) != len(names):
        return 0, None
    keys = [_odd_key(n) for n in names]
    sign = 1
    # insertion sort counting transpositions
    arr = list(zip(keys, names))
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1][0] > arr[j][0]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(n for _, n in arr)


def _even_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


class GradedPoly:
    """Element of the graded commutative algebra with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    # ---- constructors ----------------------------------------------------
    @staticmethod
    def const(c) -> "GradedPoly":
        return GradedPoly({((), ()): mpq(c)})

    @staticmethod
    def var(name: str) -> "GradedPoly":
        if is_odd(name):
            return GradedPoly({((), (name,)): mpq(1)})
        return GradedPoly({(((name, 1),), ()): mpq(1)})

    @staticmethod
    def from_expr(e) -> "GradedPoly":
        """Even polynomial from a ScalarExpr in even jet atoms."""
        e = as_expr(e)
        if e.den:
            raise GradedError("only polynomial expressions embed in the graded algebra")
        out = {}
        for mono, c in e.num.items():
            for atom, p in mono:
                if atom.__class__ is not str or p < 0 or is_odd(atom):
                    raise GradedError(f"cannot embed atom {atom!r}")
            out[(tuple(mono), ())] = mpq(c)
        return GradedPoly(out)

    # ---- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return GradedPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: dict = {}
        for (ea, oa), ca in self.terms.items():
            for (eb, ob), cb in other.terms.items():
                sign, odd = _sort_odd(list(oa) + list(ob))
                if not sign:
                    continue
                key = (_even_mul(ea, eb), odd)
                out[key] = out.get(key, 0) + ca * cb * sign
        return GradedPoly(out)

    def __rmul__(self, other):
        return _coerce(other) * self

    def __eq__(self, other):
        if not isinstance(other, GradedPoly):
            other = _coerce(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    # ---- structure -------------------------------------------------------
    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements, None when mixed (zero is even)."""
        ps = {len(o) % 2 for _, o in self.terms}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def ghost_numbers(self) -> set:
        out = set()
        for e, o in self.terms:
            g = sum(ghost_number_of(n) for n in o) + sum(ghost_number_of(n) * p for n, p in e)
            out.add(g)
        return out

    def ghost_number(self) -> int | None:
        g = self.ghost_numbers()
        if not g:
            return 0
        return g.pop() if len(g) == 1 else None

    def variables(self) -> set:
        out = set()
        for e, o in self.terms:
            out.update(n for n, _ in e)
            out.update(o)
        return out

    def subs_zero(self, names: Iterable[str]) -> "GradedPoly":
        """Set the given variables to zero."""
        names = set(names)
        return GradedPoly({k: v for k, v in self.terms.items()
                           if not (names & set(k[1])) and not any(n in names for n, _ in k[0])})

    def even_part_expr(self) -> ScalarExpr:
        """ScalarExpr of the terms without odd factors."""
        from .symexpr.core import _plain

        return _plain({e: c for (e, o), c in self.terms.items() if not o})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, o), c in sorted(self.terms.items(), key=lambda kv: (len(kv[0][1]), kv[0])):
            fac = [n if p == 1 else f"{n}^{p}" for n, p in e] + list(o)
            body = "*".join(fac)
            if not fac:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _coerce(x) -> GradedPoly:
    if isinstance(x, GradedPoly):
        return x
    if isinstance(x, ScalarExpr):
        return GradedPoly.from_expr(x)
    return GradedPoly.const(x)


def _mono(even: tuple, odd: tuple, c=1) -> GradedPoly:
    return GradedPoly({(even, odd): mpq(c)})


V = GradedPoly.var


# --------------------------------------------------------------------------
# total derivative (even derivation shifting jet order)
# --------------------------------------------------------------------------


def _shift(name: str, lam: int) -> str:
    kind, slots, deriv = split(name)
    if kind in ("sb", "kb", "cb"):
        raise GradedError("antifields carry no jets here")
    return join(kind, slots, deriv + (lam,))


def _d_atom(name: str, lam: int, dim: int) -> GradedPoly:
    kind, slots, _ = split(name)
    if kind == "sl":
        a, b = slots
        acc = GradedPoly()
        for c in range(dim):
            for d in range(dim):
                acc = acc - V(join("sl", sorted((a, c)))) * V(join("sl", sorted((d, b)))) * V(join("s", sorted((c, d)), (lam,)))
        return acc
    if kind == "rs":
        acc = GradedPoly()
        for a in range(dim):
            for b in range(dim):
                acc = acc + V(join("sl", sorted((a, b)))) * V(join("s", sorted((a, b)), (lam,)))
        return acc * V("rs") * mpq(-1, 2)
    return V(_shift(name, lam))


def total_derivative(p: GradedPoly, lam: int, dim: int = 4) -> GradedPoly:
    return Derivation(0, lambda n: _d_atom(n, lam, dim)).apply(p)


# --------------------------------------------------------------------------
# derivations
# --------------------------------------------------------------------------


@dataclass
class Derivation:
    """Graded derivation of given parity defined by its images of generators.

    ``image(name)`` returns the image of one variable (``None`` or zero for
    variables the derivation does not touch).
    """

    parity: int
    image: Callable[[str], GradedPoly | None]
    _cache: dict = field(default_factory=dict, repr=False)

    def of(self, name: str) -> GradedPoly:
        if name not in self._cache:
            v = self.image(name)
            self._cache[name] = GradedPoly() if v is None else v
        return self._cache[name]

    def apply(self, p) -> GradedPoly:
        p = _coerce(p)
        out = GradedPoly()
        acc: dict = {}
        for (even, odd), c in p.terms.items():
            # even factors: d(e^k) = k e^(k-1) d(e), d(e) placed in front
            for i, (name, e) in enumerate(even):
                img = self.of(name)
                if not img:
                    continue
                rest = even[:i] + ((name, e - 1),) + even[i + 1:] if e > 1 else even[:i] + even[i + 1:]
                _accumulate(acc, img * _mono(rest, odd, c * e))
            # odd factors: sign (-1)^(parity * position)
            for i, name in enumerate(odd):
                img = self.of(name)
                if not img:
                    continue
                sign = -1 if (self.parity and i % 2) else 1
                left = _mono(even, odd[:i], c * sign)
                right = _mono((), odd[i + 1:])
                _accumulate(acc, left * img * right)
        out.terms = {k: v for k, v in acc.items() if v}
        return out

    __call__ = apply

    def compose(self, other: "Derivation") -> Callable[[GradedPoly], GradedPoly]:
        return lambda p: self.apply(other.apply(p))


def _accumulate(acc: dict, p: GradedPoly) -> None:
    for k, v in p.terms.items():
        acc[k] = acc.get(k, 0) + v


# --------------------------------------------------------------------------
# gauge and BRST operators
# --------------------------------------------------------------------------


def _c(lam, *deriv):
    return V(join("c", (lam,), deriv))


def _s(a, b, *deriv):
    return V(join("s", sorted((a, b)), deriv))


def _k(mu, a, b, *deriv):
    return V(join("k", (mu, a, b), deriv))


def gauge_image_base(name: str, dim: int = 4) -> GradedPoly | None:
    """u on undifferentiated sigma and k."""
    kind, slots, deriv = split(name)
    if deriv:
        return None
    n = dim
    if kind == "s":
        a, b = slots
        acc = GradedPoly()
        for v in range(n):
            acc = acc + _s(v, b) * _c(a, v) + _s(a, v) * _c(b, v) - _c(v) * _s(a, b, v)
        return acc
    if kind == "k":
        mu, a, b = slots
        acc = _c(a, mu, b)
        for v in range(n):
            acc = acc + _c(a, v) * _k(mu, v, b) - _c(v, b) * _k(mu, a, v) - _c(v, mu) * _k(v, a, b)
            acc = acc - _c(v) * _k(mu, a, b, v)
        return acc
    return None


def _prolonged(base: Callable[[str], GradedPoly | None], dim: int) -> Callable[[str], GradedPoly | None]:
    """Image of a jet variable as d_I of the image of its base variable."""

    def image(name: str):
        kind, slots, deriv = split(name)
        if kind == "sl":
            a, b = slots
            acc = GradedPoly()
            for c in range(dim):
                for d in range(dim):
                    img = image(join("s", sorted((c, d))))
                    if img:
                        acc = acc - V(join("sl", sorted((a, c)))) * V(join("sl", sorted((d, b)))) * img
            return acc
        if kind == "rs":
            acc = GradedPoly()
            for a in range(dim):
                for b in range(dim):
                    img = image(join("s", sorted((a, b))))
                    if img:
                        acc = acc + V(join("sl", sorted((a, b)))) * img
            return acc * V("rs") * mpq(-1, 2)
        out = base(join(kind, slots))
        if out is None:
            return None
        for lam in deriv:
            out = total_derivative(out, lam, dim)
        return out

    return image


def gauge_operator(dim: int = 4) -> Derivation:
    """Odd derivation u: general covariant transformations with tau replaced by ghosts."""
    return Derivation(1, _prolonged(lambda n: gauge_image_base(n, dim), dim))


def brst_operator(dim: int = 4) -> Derivation:
    """u + c^lam_mu c^mu d/dc^lam, prolonged to ghost jets."""

    def base(name: str):
        kind, slots, _ = split(name)
        if kind == "c":
            lam = slots[0]
            acc = GradedPoly()
            for mu in range(dim):
                acc = acc + _c(lam, mu) * _c(mu)
            return acc
        return gauge_image_base(name, dim)

    return Derivation(1, _prolonged(base, dim))


def apply(d: Derivation, p) -> GradedPoly:
    return d.apply(p)


def generators(dim: int = 4) -> list[str]:
    """sigma, sigma_lam, k, k_lam, c, c_mu."""
    n = dim
    pairs = [(a, b) for a in range(n) for b in range(a, n)]
    out = [join("s", p) for p in pairs]
    out += [join("s", p, (l,)) for p in pairs for l in range(n)]
    ks = [(m, a, b) for m in range(n) for a in range(n) for b in range(n)]
    out += [join("k", s) for s in ks]
    out += [join("k", s, (l,)) for s in ks for l in range(n)]
    out += [join("c", (l,)) for l in range(n)]
    out += [join("c", (l,), (m,)) for l in range(n) for m in range(n)]
    return out


def _graded_verdict(p: GradedPoly, label: str) -> ZeroVerdict:
    if p.is_zero():
        return ZeroVerdict(PROVEN, label=label)
    (key, c) = sorted(p.terms.items(), key=lambda kv: str(kv[0]))[0]
    witness = {"monomial": str(_mono(*key)), "terms": len(p.terms)}
    return ZeroVerdict(NONZERO, 0, witness, c, label)


def nilpotency_check(dim: int = 4, names: Iterable[str] | None = None, operator: str = "brst") -> Report:
    """d(d(g)) for every generator g; ``operator`` is "brst" or "gauge"."""
    d = brst_operator(dim) if operator == "brst" else gauge_operator(dim)
    rep = Report(f"nilpotency of the {operator} operator (dim {dim})")
    for g in (names or generators(dim)):
        rep.add(g, _graded_verdict(d.apply(d.apply(V(g))), g))
    return rep


# --------------------------------------------------------------------------
# extended Lagrangian
# --------------------------------------------------------------------------


def antifield_sigma(a, b):
    return V(join("sb", sorted((a, b))))


def antifield_k(mu, a, b):
    return V(join("kb", (mu, a, b)))


def antifield_ghost(lam):
    return V(join("cb", (lam,)))


def extended_lagrangian(L=None, dim: int = 4) -> GradedPoly:
    """L + u^{ab} sb_{ab} + u_mu^a_b kb^mu_a^b + c^lam_mu c^mu cb_lam."""
    n = dim
    out = GradedPoly() if L is None else _coerce(getattr(L, "density", L))
    for a in range(n):
        for b in range(n):
            # ordered pairs; the symmetric antifield class is shared
            out = out + gauge_image_base(join("s", sorted((a, b))), n) * antifield_sigma(a, b)
    for mu in range(n):
        for a in range(n):
            for b in range(n):
                out = out + gauge_image_base(join("k", (mu, a, b)), n) * antifield_k(mu, a, b)
    for lam in range(n):
        for mu in range(n):
            out = out + _c(lam, mu) * _c(mu) * antifield_ghost(lam)
    return out


def antifield_names(dim: int = 4) -> list[str]:
    n = dim
    out = [join("sb", (a, b)) for a in range(n) for b in range(a, n)]
    out += [join("kb", (m, a, b)) for m in range(n) for a in range(n) for b in range(n)]
    out += [join("cb", (l,)) for l in range(n)]
    return out


# --------------------------------------------------------------------------
# random elements (for property tests and demos)
# --------------------------------------------------------------------------


def random_poly(rng: random.Random, dim: int = 2, terms: int = 4, max_odd: int = 2, jet: int = 1) -> GradedPoly:
    """Random element mixing sigma/k jets and ghosts up to the given jet order."""
    n = dim
    even = [join("s", (a, b), d) for a in range(n) for b in range(a, n)
            for o in range(jet + 1) for d in itertools.combinations_with_replacement(range(n), o)]
    even += [join("k", (m, a, b), d) for m in range(n) for a in range(n) for b in range(n)
             for o in range(jet + 1) for d in itertools.combinations_with_replacement(range(n), o)]
    odd = [join("c", (l,), d) for l in range(n) for o in range(jet + 1)
           for d in itertools.combinations_with_replacement(range(n), o)]
    out = GradedPoly()
    for _ in range(terms):
        t = GradedPoly.const(mpq(rng.randint(-5, 5) or 1, rng.randint(1, 3)))
        for _ in range(rng.randint(0, 2)):
            t = t * V(rng.choice(even))
        for _ in range(rng.randint(0, max_odd)):
            t = t * V(rng.choice(odd))
        out = out + t
    return out
