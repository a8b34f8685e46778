"""Jet coordinates of metrics and world connections, and total derivatives.

Naming (all indices single digits, multi-indices sorted):

* ``s01``          sigma^{01} (one slot per symmetric pair, a <= b)
* ``s01_23``       sigma^{01}_{23}, derivatives along x^2 and x^3
* ``k101``         k_1^0_1 (slots mu, alpha, beta)
* ``k101_2``       k_{21}^0_1 = d_2 k_1^0_1
* ``t0``, ``t0_12``  gauge parameter tau^0 and its derivatives
* ``c0``, ``c0_1``   ghosts (used by the BRST module)
* ``sl01``         the lowered metric sigma_{01}, a dependent symbol
* ``rs``           sqrt(|det sigma_{ab}|), a dependent symbol
"""
from __future__ import annotations

import itertools
import math
import random
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from ..symexpr import ZERO, FuncAtom, ScalarExpr, VarTable, as_expr, sym

HALF = mpq(1, 2)

_NAME_RE = re.compile(r"^(s|k|t|c|sl|rs)(\d*)(?:_(\d+))?$")


class JetOrderError(ValueError):
    """A total derivative would exceed the jet order available in the context."""


@dataclass(frozen=True)
class JetVar:
    kind: str          # s, k, t, c, sl, rs
    slots: tuple       # field indices
    deriv: tuple = ()  # sorted derivative directions

    @property
    def order(self) -> int:
        return len(self.deriv)

    @property
    def name(self) -> str:
        base = self.kind + "".join(map(str, self.slots))
        if self.deriv:
            base += "_" + "".join(map(str, self.deriv))
        return base


@lru_cache(maxsize=None)
def parse_name(name: str) -> JetVar | None:
    m = _NAME_RE.match(name)
    if not m:
        return None
    kind, slots, deriv = m.group(1), m.group(2), m.group(3) or ""
    return JetVar(kind, tuple(int(c) for c in slots), tuple(sorted(int(c) for c in deriv)))


def _name(kind: str, slots, deriv=()) -> str:
    return JetVar(kind, tuple(slots), tuple(sorted(deriv))).name


def multiplicity(idx) -> int:
    """Number of ordered index tuples represented by a sorted multi-index."""
    c = Counter(idx)
    out = math.factorial(len(idx))
    for v in c.values():
        out //= math.factorial(v)
    return out


class JetContext:
    """Jet space of (sigma, k) with gauge parameters, of bounded order.

    ``sigma_order`` and ``k_order`` bound the derivative order of the field
    jets; ``tau_order`` that of the gauge parameters and ghosts.
    """

    def __init__(self, dim: int = 4, sigma_order: int = 3, k_order: int = 4, tau_order: int = 3):
        if not 2 <= dim <= 9:
            raise ValueError("dim must be between 2 and 9")
        self.dim = dim
        self.orders = {"s": sigma_order, "k": k_order, "t": tau_order, "c": tau_order}
        self.eta = [1] + [-1] * (dim - 1)
        self.zero = ZERO
        self.rs_name = "rs"
        self._rs = sym("rs")
        self._dsl_cache: dict = {}

    # ---- variables ------------------------------------------------------
    def s(self, a: int, b: int, *deriv) -> ScalarExpr:
        a, b = sorted((a, b))
        return sym(_name("s", (a, b), deriv))

    def sl(self, a: int, b: int) -> ScalarExpr:
        a, b = sorted((a, b))
        return sym(f"sl{a}{b}")

    def rs(self) -> ScalarExpr:
        return self._rs

    def k(self, mu: int, a: int, b: int, *deriv) -> ScalarExpr:
        return sym(_name("k", (mu, a, b), deriv))

    def t(self, lam: int, *deriv) -> ScalarExpr:
        return sym(_name("t", (lam,), deriv))

    def c(self, lam: int, *deriv) -> ScalarExpr:
        return sym(_name("c", (lam,), deriv))

    def s_name(self, a, b, *deriv) -> str:
        a, b = sorted((a, b))
        return _name("s", (a, b), deriv)

    def k_name(self, mu, a, b, *deriv) -> str:
        return _name("k", (mu, a, b), deriv)

    def sigma_pairs(self):
        return [(a, b) for a in range(self.dim) for b in range(a, self.dim)]

    def derivs(self, order: int):
        return list(itertools.combinations_with_replacement(range(self.dim), order))

    def variables(self, kinds: str = "sk") -> list[str]:
        n = self.dim
        out = []
        if "s" in kinds:
            for o in range(self.orders["s"] + 1):
                for d in self.derivs(o):
                    out += [self.s_name(a, b, *d) for a, b in self.sigma_pairs()]
        if "k" in kinds:
            for o in range(self.orders["k"] + 1):
                for d in self.derivs(o):
                    out += [self.k_name(m, a, b, *d) for m in range(n) for a in range(n) for b in range(n)]
        for kind in "tc":
            if kind in kinds:
                for o in range(self.orders[kind] + 1):
                    for d in self.derivs(o):
                        out += [_name(kind, (l,), d) for l in range(n)]
        return out

    def vartable(self, kinds: str = "sk") -> VarTable:
        t = VarTable()
        for v in self.variables(kinds):
            jv = parse_name(v)
            role = "ghost" if jv.kind == "c" else "jet"
            t.add(v, role, base=jv.kind + "".join(map(str, jv.slots)), multi_index=jv.deriv)
        for a, b in self.sigma_pairs():
            t.add(f"sl{a}{b}", "jet", base="sl")
        t.add("rs", "jet", base="rs")
        return t

    # ---- total derivative ------------------------------------------------
    def shift(self, name: str, lam: int) -> str:
        jv = parse_name(name)
        if jv is None or jv.kind in ("sl", "rs"):
            raise KeyError(name)
        if jv.order + 1 > self.orders[jv.kind]:
            raise JetOrderError(f"d_{lam} {name} exceeds jet order {self.orders[jv.kind]}")
        return JetVar(jv.kind, jv.slots, tuple(sorted(jv.deriv + (lam,)))).name

    def d_atom(self, atom, lam: int) -> ScalarExpr:
        """Total derivative of a single atom."""
        if atom.__class__ is FuncAtom:
            raise TypeError("function atoms are not supported in jet expressions")
        jv = parse_name(atom)
        if jv is None:
            return ZERO  # constants of the problem (no explicit x dependence)
        if jv.kind == "sl":
            return self.d_sl(jv.slots[0], jv.slots[1], lam)
        if jv.kind == "rs":
            acc = ZERO
            for a in range(self.dim):
                for b in range(self.dim):
                    acc = acc + self.sl(a, b) * self.s(a, b, lam)
            return acc * self._rs * (-HALF)
        return sym(self.shift(atom, lam))

    def d_sl(self, a: int, b: int, lam: int) -> ScalarExpr:
        key = (a, b, lam)
        if key not in self._dsl_cache:
            acc = ZERO
            for c in range(self.dim):
                for d in range(self.dim):
                    acc = acc - self.sl(a, c) * self.sl(d, b) * self.s(c, d, lam)
            self._dsl_cache[key] = acc
        return self._dsl_cache[key]

    def total_derivative(self, e, lam: int) -> ScalarExpr:
        """d_lam e, with sigma_{ab} and sqrt(sigma) differentiated through the metric."""
        e = as_expr(e)
        if not e.num:
            return ZERO
        if e.den:
            raise TypeError("jet expressions must be polynomial in jet atoms")
        acc = ZERO
        for atom in sorted(e.atoms(), key=_atom_key):
            da = self.d_atom(atom, lam)
            if da.num:
                acc = acc + e.formal_diff(atom) * da
        return acc

    def d(self, e, *lams) -> ScalarExpr:
        for lam in lams:
            e = self.total_derivative(e, lam)
        return e

    # ---- partial derivatives in jet coordinates -------------------------
    def partial_sigma(self, e: ScalarExpr, a: int, b: int, *deriv) -> ScalarExpr:
        """d e / d sigma^{ab}_{deriv} for one ordered component."""
        e = as_expr(e)
        name = self.s_name(a, b, *deriv)
        mult = (1 if a == b else 2) * multiplicity(deriv)
        out = e.formal_diff(name) * mpq(1, mult)
        if deriv:
            return out
        for atom in e.atoms():
            if atom.__class__ is not str:
                continue
            if atom == "rs":
                out = out + e.formal_diff("rs") * self._rs * self.sl(a, b) * (-HALF)
            elif atom.startswith("sl"):
                p, q = int(atom[2]), int(atom[3])
                dsl = -(self.sl(p, a) * self.sl(b, q) + self.sl(p, b) * self.sl(a, q)) * HALF
                out = out + e.formal_diff(atom) * dsl
        return out

    def partial_k(self, e: ScalarExpr, mu: int, a: int, b: int, *deriv) -> ScalarExpr:
        """d e / d k_{deriv, mu}^a_b for one ordered derivative tuple."""
        name = self.k_name(mu, a, b, *deriv)
        return as_expr(e).formal_diff(name) * mpq(1, multiplicity(deriv))

    # ---- sampling -------------------------------------------------------
    def metric_sample(self, rng: random.Random, lorentzian: bool = True) -> dict:
        """Exact point for (s, sl, rs) with a rational square root of |det|.

        sigma^{..} = P diag(d_i) P^T with each |d_i| a rational square and P
        unit lower triangular, so det P = 1.
        """
        n = self.dim
        while True:
            diag = []
            for i in range(n):
                r = mpq(rng.randint(1, 9), rng.randint(1, 5))
                sign = 1 if (i == 0 or not lorentzian) else -1
                diag.append((sign * r * r, r))
            P = [[mpq(0)] * n for _ in range(n)]
            for i in range(n):
                P[i][i] = mpq(1)
                for j in range(i):
                    P[i][j] = mpq(rng.randint(-3, 3), rng.randint(1, 4))
            S = [[sum(P[i][k] * diag[k][0] * P[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
            # inverse: P^-T diag^-1 P^-1
            Pinv = _lower_inverse(P)
            Sl = [[sum(Pinv[k][i] * Pinv[k][j] / diag[k][0] for k in range(n)) for j in range(n)] for i in range(n)]
            prod = mpq(1)
            for _, r in diag:
                prod *= r
            point = {}
            for a, b in self.sigma_pairs():
                point[self.s_name(a, b)] = S[a][b]
                point[f"sl{a}{b}"] = Sl[a][b]
            # sigma = |det sigma_{ab}| = 1 / |det sigma^{ab}|
            point["rs"] = 1 / prod
            return point

    def sampler(self, names, lorentzian: bool = True):
        """Sampler for a set of symbol names, consistent on the metric block."""
        names = sorted(set(names))

        def draw(rng: random.Random) -> dict:
            pt = self.metric_sample(rng, lorentzian)
            for nm in names:
                if nm not in pt:
                    pt[nm] = mpq(rng.randint(-9, 9), rng.randint(1, 5))
            return pt

        return draw


def _lower_inverse(P):
    n = len(P)
    inv = [[mpq(0)] * n for _ in range(n)]
    for i in range(n):
        inv[i][i] = 1 / P[i][i]
        for j in range(i):
            acc = mpq(0)
            for k in range(j, i):
                acc += P[i][k] * inv[k][j]
            inv[i][j] = -acc / P[i][i]
    return inv


def _atom_key(a):
    return (0, a) if a.__class__ is str else (1, repr(a))
