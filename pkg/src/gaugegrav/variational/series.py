"""Truncated multivariate Taylor series with exact coefficients.

Used to evaluate jet expressions along random polynomial sections: for a
section phi, a total derivative d_lam of an expression E in jet variables
satisfies (d_lam E)(j phi)(x) = d/dx^lam [E(j phi(x))].  Carrying every
quantity as a truncated Taylor polynomial in x therefore turns total
derivatives into plain differentiation, and the constant term of the
result is the value of the symbolic identity at the jet point j phi(0).
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from gmpy2 import mpq

_ZERO = mpq(0)


class SeriesSpace:
    """Monomials x^e with |e| <= order in ``dim`` variables."""

    def __init__(self, dim: int, order: int):
        self.dim = dim
        self.order = order
        monos = []
        for deg in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(dim), deg):
                e = [0] * dim
                for i in combo:
                    e[i] += 1
                monos.append(tuple(e))
        self.monos = monos
        self.index = {e: i for i, e in enumerate(monos)}
        self.size = len(monos)
        self.degree = [sum(e) for e in monos]
        # multiplication table grouped by left index
        table = []
        for i, a in enumerate(monos):
            row = []
            da = self.degree[i]
            for j, b in enumerate(monos):
                if da + self.degree[j] > order:
                    continue
                row.append((j, self.index[tuple(x + y for x, y in zip(a, b))]))
            table.append(row)
        self.table = table
        # derivative maps: list of (source index, target index, factor)
        self.dmaps = []
        for lam in range(dim):
            m = []
            for i, e in enumerate(monos):
                if e[lam]:
                    t = list(e)
                    t[lam] -= 1
                    m.append((i, self.index[tuple(t)], e[lam]))
            self.dmaps.append(m)

    def zero(self, valid: int | None = None) -> "TSeries":
        return TSeries(self, [_ZERO] * self.size, self.order if valid is None else valid)

    def const(self, c) -> "TSeries":
        v = [_ZERO] * self.size
        v[0] = mpq(c)
        return TSeries(self, v, self.order)

    def from_poly(self, coeffs: dict) -> "TSeries":
        """Series from {exponent tuple: coefficient}, dropping high degrees."""
        v = [_ZERO] * self.size
        for e, c in coeffs.items():
            i = self.index.get(e)
            if i is not None:
                v[i] = mpq(c)
        return TSeries(self, v, self.order)


@lru_cache(maxsize=16)
def space(dim: int, order: int) -> SeriesSpace:
    return SeriesSpace(dim, order)


class TSeries:
    """Truncated Taylor polynomial; ``valid`` is the highest trustworthy degree."""

    __slots__ = ("sp", "c", "valid")

    def __init__(self, sp: SeriesSpace, coeffs: list, valid: int):
        self.sp = sp
        self.c = coeffs
        self.valid = valid

    def _coerce(self, other):
        if isinstance(other, TSeries):
            return other
        return self.sp.const(other)

    def __add__(self, other):
        if not isinstance(other, TSeries):
            if not other:
                return self
            v = list(self.c)
            v[0] = v[0] + other
            return TSeries(self.sp, v, self.valid)
        return TSeries(self.sp, [a + b for a, b in zip(self.c, other.c)], min(self.valid, other.valid))

    __radd__ = __add__

    def __neg__(self):
        return TSeries(self.sp, [-a for a in self.c], self.valid)

    def __sub__(self, other):
        if not isinstance(other, TSeries):
            return self + (-other)
        return TSeries(self.sp, [a - b for a, b in zip(self.c, other.c)], min(self.valid, other.valid))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TSeries):
            if not other:
                return self.sp.zero(self.valid)
            if other == 1:
                return self
            o = mpq(other)
            return TSeries(self.sp, [a * o for a in self.c], self.valid)
        out = [_ZERO] * self.sp.size
        b = other.c
        table = self.sp.table
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, k in table[i]:
                bj = b[j]
                if bj:
                    out[k] += a * bj
        return TSeries(self.sp, out, min(self.valid, other.valid))

    __rmul__ = __mul__

    def derivative(self, lam: int) -> "TSeries":
        out = [_ZERO] * self.sp.size
        c = self.c
        for i, t, f in self.sp.dmaps[lam]:
            if c[i]:
                out[t] += c[i] * f
        return TSeries(self.sp, out, self.valid - 1)

    def constant(self):
        if self.valid < 0:
            raise ValueError("series derivative order exceeded: constant term is not valid")
        return self.c[0]

    def is_zero(self) -> bool:
        return not any(self.c)

    def __repr__(self):
        return f"TSeries(valid={self.valid}, c0={self.c[0]})"


def series_inverse_matrix(S: list, S0inv: list) -> list:
    """Inverse of a matrix of series given the exact inverse of its constant part."""
    n = len(S)
    sp = S[0][0].sp
    # Delta = S - S0, M = -S0inv Delta
    delta = [[S[i][j] - S[i][j].c[0] for j in range(n)] for i in range(n)]
    M = [[sum((delta[k][j] * (-S0inv[i][k]) for k in range(n)), sp.zero()) for j in range(n)] for i in range(n)]
    # sum_{p} M^p S0inv
    term = [[sp.const(S0inv[i][j]) for j in range(n)] for i in range(n)]
    acc = [row[:] for row in term]
    for _ in range(sp.order):
        term = [[sum((M[i][k] * term[k][j] for k in range(n)), sp.zero()) for j in range(n)] for i in range(n)]
        acc = [[acc[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    return acc


def series_det(S: list):
    n = len(S)
    if n == 1:
        return S[0][0]
    sp = S[0][0].sp
    acc = sp.zero()
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in S[1:]]
        term = S[0][j] * series_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def series_power_one_plus(u: "TSeries", exponent: mpq) -> "TSeries":
    """(1 + u)^exponent for u without constant term."""
    sp = u.sp
    acc = sp.const(1)
    term = sp.const(1)
    coef = mpq(1)
    for k in range(1, sp.order + 1):
        coef = coef * (exponent - k + 1) / k
        term = term * u
        acc = acc + term * coef
    return acc


# --------------------------------------------------------------------------
# reverse-mode differentiation on a tape of series values
# --------------------------------------------------------------------------


class Tape:
    def __init__(self):
        self.nodes: list = []

    def var(self, value) -> "Node":
        return Node(self, value, ())

    def gradient(self, out: "Node", inputs) -> list:
        adj = {id(out): out.tape_one()}
        for node in reversed(self.nodes):
            a = adj.get(id(node))
            if a is None:
                continue
            for parent, local in node.parents:
                contrib = a * local if local is not None else a
                key = id(parent)
                prev = adj.get(key)
                adj[key] = contrib if prev is None else prev + contrib
        return [adj.get(id(x)) for x in inputs]


class Node:
    """A tape entry; arithmetic records local derivatives for backpropagation."""

    __slots__ = ("tape", "value", "parents")

    def __init__(self, tape: Tape, value, parents):
        self.tape = tape
        self.value = value
        self.parents = parents
        tape.nodes.append(self)

    def tape_one(self):
        v = self.value
        return v.sp.const(1) if isinstance(v, TSeries) else mpq(1)

    def __add__(self, other):
        if isinstance(other, Node):
            return Node(self.tape, self.value + other.value, ((self, None), (other, None)))
        if not other:
            return self
        return Node(self.tape, self.value + other, ((self, None),))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Node):
            return Node(self.tape, self.value - other.value, ((self, None), (other, mpq(-1))))
        return Node(self.tape, self.value - other, ((self, None),))

    def __rsub__(self, other):
        return Node(self.tape, other - self.value, ((self, mpq(-1)),))

    def __neg__(self):
        return Node(self.tape, -self.value, ((self, mpq(-1)),))

    def __mul__(self, other):
        if isinstance(other, Node):
            return Node(self.tape, self.value * other.value, ((self, other.value), (other, self.value)))
        o = mpq(other)
        return Node(self.tape, self.value * o, ((self, o),))

    __rmul__ = __mul__
