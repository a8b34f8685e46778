"""Exact scalar expressions.

A :class:`ScalarExpr` is stored in a canonical distributed form::

    numerator / (f1^e1 * f2^e2 * ...)

The numerator is a Laurent polynomial with rational coefficients over
*atoms* (named indeterminates and unary function applications).  Each
denominator factor ``f`` is a genuine polynomial with at least two terms,
no monomial content, and leading coefficient one.  Products of sums are
always expanded, so polynomial identities collapse to the zero constant,
and sums of fractions are brought over a common denominator, so rational
identities do too.  Nothing is known about trigonometric identities.

Coefficients are ``gmpy2.mpq`` throughout.
"""
from __future__ import annotations

import functools
import math

import mpmath
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq, is_square, isqrt

__all__ = [
    "ScalarExpr",
    "FuncAtom",
    "FUNCTIONS",
    "DomainError",
    "const",
    "sym",
    "symbols",
    "func",
    "sin",
    "cos",
    "exp",
    "ln",
    "sqrt",
    "as_expr",
    "ZERO",
    "ONE",
]

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")

# numerators above this size are not trial-divided by denominator factors
CANCEL_NUM_LIMIT = 600
CANCEL_FACTOR_LIMIT = 80


class DomainError(ArithmeticError):
    """Evaluation left the domain (zero denominator, sqrt/ln of nonpositive)."""


# --------------------------------------------------------------------------
# atoms and monomials
# --------------------------------------------------------------------------


class FuncAtom:
    """A unary function applied to a canonical expression.

    Sorts after every plain symbol; among themselves by name, then argument.
    """

    __slots__ = ("name", "arg", "_key", "_hash")

    def __init__(self, name: str, arg: "ScalarExpr"):
        self.name = name
        self.arg = arg
        self._key = (name, arg.sort_key())
        self._hash = hash(("func", name, arg))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if other.__class__ is not FuncAtom:
            return False
        return self.name == other.name and self.arg == other.arg

    def __ne__(self, other):
        return not self.__eq__(other)

    def __lt__(self, other):
        if other.__class__ is str:
            return False
        return self._key < other._key

    def __gt__(self, other):
        if other.__class__ is str:
            return True
        return self._key > other._key

    def __le__(self, other):
        return self == other or self < other

    def __ge__(self, other):
        return self == other or self > other

    def __repr__(self):
        return f"{self.name}({self.arg})"


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for a, e in m2:
        s = d.get(a)
        if s is None:
            d[a] = e
        else:
            s += e
            if s:
                d[a] = s
            else:
                del d[a]
    return tuple(sorted(d.items()))


def _mono_pow(m: tuple, n: int) -> tuple:
    if n == 0:
        return ()
    return tuple((a, e * n) for a, e in m)


def _mono_inv(m: tuple) -> tuple:
    return tuple((a, -e) for a, e in m)


# --------------------------------------------------------------------------
# sparse polynomial helpers (dict: monomial -> mpq)
# --------------------------------------------------------------------------


def _p_add_into(acc: dict, p: dict, scale=None) -> None:
    if scale is None:
        for m, c in p.items():
            s = acc.get(m)
            if s is None:
                acc[m] = c
            else:
                s += c
                if s:
                    acc[m] = s
                else:
                    del acc[m]
    else:
        for m, c in p.items():
            c = c * scale
            s = acc.get(m)
            if s is None:
                acc[m] = c
            else:
                s += c
                if s:
                    acc[m] = s
                else:
                    del acc[m]


def _p_mul(p: dict, q: dict) -> dict:
    if len(p) > len(q):
        p, q = q, p
    if not p:
        return {}
    acc: dict = {}
    mul = _mono_mul
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mul(m1, m2)
            c = c1 * c2
            s = acc.get(m)
            if s is None:
                acc[m] = c
            else:
                s += c
                if s:
                    acc[m] = s
                else:
                    del acc[m]
    return acc


def _p_mono_mul(p: dict, mono: tuple, c=None) -> dict:
    if c is None:
        return {_mono_mul(m, mono): v for m, v in p.items()}
    return {_mono_mul(m, mono): v * c for m, v in p.items()}


def _p_pow(p: dict, n: int) -> dict:
    result = {(): mpq(1)}
    base = p
    while n:
        if n & 1:
            result = _p_mul(result, base)
        n >>= 1
        if n:
            base = _p_mul(base, base)
    return result


def _lex_cmp(m1: tuple, m2: tuple) -> int:
    # lexicographic monomial order, smallest atom most significant
    for (a, e), (b, f) in zip(m1, m2):
        if a == b:
            if e != f:
                return 1 if e > f else -1
        else:
            return 1 if a < b else -1
    if len(m1) != len(m2):
        return 1 if len(m1) > len(m2) else -1
    return 0


_lex_key = functools.cmp_to_key(_lex_cmp)


def _leading(p: dict) -> tuple:
    return max(p, key=_lex_key)


def _mono_div(m: tuple, d: tuple):
    """m / d if d divides m with nonnegative result exponents, else None."""
    dm = dict(m)
    for a, e in d:
        have = dm.get(a, 0)
        if have < e:
            return None
        if have == e:
            del dm[a]
        else:
            dm[a] = have - e
    return tuple(sorted(dm.items()))


def _monomial_content(p: dict) -> tuple:
    """Largest monomial dividing every term (exponents may be negative)."""
    it = iter(p)
    low = dict(next(it))
    for m in it:
        md = dict(m)
        for a in low:
            e = md.get(a, 0)
            if e < low[a]:
                low[a] = e
        for a, e in md.items():
            if a not in low and e < 0:
                low[a] = e
    return tuple(sorted((a, e) for a, e in low.items() if e))


def _exact_div(num: dict, f: dict):
    """Return num / f as a Laurent polynomial if f divides num, else None."""
    content = _monomial_content(num)
    shift = tuple((a, -e) for a, e in content if e < 0)
    r = _p_mono_mul(num, shift) if shift else dict(num)
    lt_f = _leading(f)
    cf = f[lt_f]
    q: dict = {}
    steps = 0
    limit = 4 * len(num) + 50
    while r:
        steps += 1
        if steps > limit:
            return None
        lt_r = _leading(r)
        qm = _mono_div(lt_r, lt_f)
        if qm is None:
            return None
        c = r[lt_r] / cf
        q[qm] = q.get(qm, 0) + c
        for m, v in f.items():
            mm = _mono_mul(m, qm)
            s = r.get(mm, 0) - v * c
            if s:
                r[mm] = s
            else:
                r.pop(mm, None)
    if shift:
        q = _p_mono_mul(q, _mono_inv(shift))
    return q


# --------------------------------------------------------------------------
# denominator factors
# --------------------------------------------------------------------------


class DenFactor:
    """A normalized polynomial denominator factor (>= 2 terms, monic)."""

    __slots__ = ("poly", "key", "_hash")

    def __init__(self, poly: dict):
        self.poly = poly
        self.key = tuple(sorted(poly.items()))
        self._hash = hash(self.key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, DenFactor) and self.key == other.key

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"DenFactor({_poly_str(self.poly)})"


def _split_poly(p: dict):
    """Write p = c * M * F with monomial M, scalar c and normalized factor F.

    Returns (c, M, F) where F is a DenFactor or None when p is a monomial.
    """
    if len(p) == 1:
        (m, c), = p.items()
        return c, m, None
    content = _monomial_content(p)
    if content:
        inv = _mono_inv(content)
        p = _p_mono_mul(p, inv)
    lt = _leading(p)
    c = p[lt]
    if c != 1:
        ic = 1 / c
        p = {m: v * ic for m, v in p.items()}
    return c, content, DenFactor(p)


# --------------------------------------------------------------------------
# the expression type
# --------------------------------------------------------------------------


class ScalarExpr:
    """Immutable exact scalar expression in canonical form."""

    __slots__ = ("num", "den", "_hash", "_key", "_free")

    def __init__(self, num: dict, den: tuple = ()):
        # callers guarantee canonical data; use _make for normalization
        self.num = num
        self.den = den
        self._hash = None
        self._key = None
        self._free = None

    # ---- construction -------------------------------------------------
    @staticmethod
    def _make(num: dict, den: dict | tuple = ()) -> "ScalarExpr":
        if not num:
            return ZERO
        if isinstance(den, dict):
            den = tuple(sorted((f, e) for f, e in den.items() if e))
        if den and len(num) <= CANCEL_NUM_LIMIT:
            new_den = []
            changed = False
            for f, e in den:
                if len(f.poly) <= CANCEL_FACTOR_LIMIT:
                    while e:
                        q = _exact_div(num, f.poly)
                        if q is None:
                            break
                        num = q
                        e -= 1
                        changed = True
                if e:
                    new_den.append((f, e))
            if changed:
                den = tuple(new_den)
        return ScalarExpr(num, den)

    # ---- basic predicates --------------------------------------------
    def is_zero_structural(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return not self.den and all(not m for m in self.num)

    def constant_value(self):
        """The rational value of a constant expression (else ValueError)."""
        if not self.num:
            return mpq(0)
        if self.is_constant():
            return self.num[()]
        raise ValueError(f"not a constant: {self}")

    def is_polynomial(self) -> bool:
        return not self.den and all(e > 0 for m in self.num for _, e in m)

    @property
    def free_symbols(self) -> frozenset:
        if self._free is None:
            out = set()
            for m in self.num:
                for a, _ in m:
                    if a.__class__ is str:
                        out.add(a)
                    else:
                        out |= a.arg.free_symbols
            for f, _ in self.den:
                for m in f.poly:
                    for a, _ in m:
                        if a.__class__ is str:
                            out.add(a)
                        else:
                            out |= a.arg.free_symbols
            self._free = frozenset(out)
        return self._free

    def atoms(self) -> set:
        out = set()
        for m in self.num:
            out.update(a for a, _ in m)
        for f, _ in self.den:
            for m in f.poly:
                out.update(a for a, _ in m)
        return out

    def has_functions(self) -> bool:
        return any(a.__class__ is FuncAtom for a in self.atoms())

    def nterms(self) -> int:
        return len(self.num) + sum(len(f.poly) for f, _ in self.den)

    # ---- equality / hashing / ordering -------------------------------
    def sort_key(self):
        if self._key is None:
            self._key = (tuple(sorted(self.num.items())), tuple((f.key, e) for f, e in self.den))
        return self._key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), self.den))
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, ScalarExpr):
            try:
                other = as_expr(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __bool__(self):
        return bool(self.num)

    # ---- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = as_expr(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            acc = dict(self.num)
            _p_add_into(acc, other.num)
            return ScalarExpr._make(acc, self.den) if self.den else _plain(acc)
        d1 = dict(self.den)
        d2 = dict(other.den)
        lcm = dict(d1)
        for f, e in d2.items():
            if lcm.get(f, 0) < e:
                lcm[f] = e
        n1 = self.num
        for f, e in lcm.items():
            k = e - d1.get(f, 0)
            if k:
                n1 = _p_mul(n1, _p_pow(f.poly, k))
        n2 = other.num
        for f, e in lcm.items():
            k = e - d2.get(f, 0)
            if k:
                n2 = _p_mul(n2, _p_pow(f.poly, k))
        acc = dict(n1)
        _p_add_into(acc, n2)
        return ScalarExpr._make(acc, lcm)

    __radd__ = __add__

    def __neg__(self):
        if not self.num:
            return self
        return ScalarExpr({m: -c for m, c in self.num.items()}, self.den)

    def __sub__(self, other):
        return self + (-as_expr(other))

    def __rsub__(self, other):
        return as_expr(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, ScalarExpr):
            if isinstance(other, (int, mpq)) or type(other).__name__ == "Fraction":
                c = mpq(other)
                if not c or not self.num:
                    return ZERO
                if c == 1:
                    return self
                return ScalarExpr({m: v * c for m, v in self.num.items()}, self.den)
            other = as_expr(other)
        if not self.num or not other.num:
            return ZERO
        num = _p_mul(self.num, other.num)
        if not self.den and not other.den:
            return _plain(num)
        den = dict(self.den)
        for f, e in other.den:
            den[f] = den.get(f, 0) + e
        return ScalarExpr._make(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "ScalarExpr":
        if not self.num:
            raise ZeroDivisionError("inverse of zero expression")
        c, mono, factor = _split_poly(self.num)
        num = {_mono_inv(mono): 1 / c}
        for f, e in self.den:
            num = _p_mul(num, _p_pow(f.poly, e))
        den = {factor: 1} if factor is not None else {}
        return ScalarExpr._make(num, den)

    def __truediv__(self, other):
        other = as_expr(other)
        if other.is_constant():
            v = other.constant_value()
            if not v:
                raise ZeroDivisionError("division by zero constant")
            return self * (1 / v)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_expr(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return ONE
        if n < 0:
            return self.inverse() ** (-n)
        if n == 1:
            return self
        if len(self.num) == 1 and not self.den:
            (m, c), = self.num.items()
            return ScalarExpr({_mono_pow(m, n): c ** n})
        num = _p_pow(self.num, n)
        den = {f: e * n for f, e in self.den}
        return ScalarExpr._make(num, den)

    # ---- calculus -----------------------------------------------------
    def diff(self, v: str, deps: Mapping[str, Mapping[str, "ScalarExpr"]] | None = None) -> "ScalarExpr":
        """Exact partial derivative with respect to the indeterminate ``v``.

        ``deps`` maps dependent symbols to their partial derivatives:
        ``deps[s][v]`` is d s / d v.  Used for chain rules through formal
        symbols such as an inverse metric.
        """
        if not self.num:
            return ZERO
        dn = _poly_diff(self.num, v, deps)
        if not self.den:
            return dn
        dinv = ScalarExpr._make({(): mpq(1)}, self.den)
        result = dn * dinv
        numexpr = None
        for f, e in self.den:
            df = _poly_diff(f.poly, v, deps)
            if not df.num:
                continue
            if numexpr is None:
                numexpr = _plain(dict(self.num))
            fexpr = _plain(dict(f.poly))
            result = result - numexpr * df * mpq(e) * dinv / fexpr
        return result

    def formal_diff(self, atom) -> "ScalarExpr":
        """Derivative treating ``atom`` (symbol name or FuncAtom) as independent."""
        if not self.num:
            return ZERO
        if not self.den:
            return _plain(_poly_atom_diff(self.num, atom))
        return self.diff_by_atom(atom)

    def diff_by_atom(self, atom) -> "ScalarExpr":
        dn = _plain(_poly_atom_diff(self.num, atom))
        if not self.den:
            return dn
        dinv = ScalarExpr._make({(): mpq(1)}, self.den)
        result = dn * dinv
        numexpr = _plain(dict(self.num))
        for f, e in self.den:
            df = _poly_atom_diff(f.poly, atom)
            if not df:
                continue
            result = result - numexpr * _plain(df) * mpq(e) * dinv / _plain(dict(f.poly))
        return result

    # ---- substitution / evaluation -----------------------------------
    def subs(self, mapping: Mapping[str, "ScalarExpr"]) -> "ScalarExpr":
        """Simultaneous substitution of symbols by expressions."""
        mapping = {k: as_expr(v) for k, v in mapping.items()}
        if not (self.free_symbols & mapping.keys()):
            return self
        cache: dict = {}

        def atom_val(a):
            if a in cache:
                return cache[a]
            if a.__class__ is str:
                val = mapping.get(a)
                if val is None:
                    val = sym(a)
            else:
                val = func(a.name, a.arg.subs(mapping))
            cache[a] = val
            return val

        def poly_val(p):
            # group by atoms that actually change
            total = ZERO
            plain: dict = {}
            for m, c in p.items():
                keep = []
                term = None
                for a, e in m:
                    changes = (a.__class__ is str and a in mapping) or (
                        a.__class__ is FuncAtom and a.arg.free_symbols & mapping.keys()
                    )
                    if changes:
                        t = atom_val(a) ** e
                        term = t if term is None else term * t
                    else:
                        keep.append((a, e))
                if term is None:
                    _p_add_into(plain, {m: c})
                else:
                    total = total + term * ScalarExpr({tuple(keep): c})
            return total + _plain(plain)

        result = poly_val(self.num)
        for f, e in self.den:
            result = result / poly_val(f.poly) ** e
        return result

    def evaluate(self, point: Mapping[str, object]):
        """Evaluate at a point.

        Exact (``mpq``) when every atom evaluates exactly, else ``float``.
        Raises DomainError on a zero denominator or invalid sqrt/ln argument
        and KeyError on a missing symbol.
        """
        return _Evaluator(point).value(self)

    def evaluate_with_magnitude(self, point: Mapping[str, object]):
        """Float value plus the sum of absolute term magnitudes."""
        return _Evaluator(point).float_with_magnitude(self)

    def evaluate_mp(self, point: Mapping[str, object], dps: int = 60):
        """High-precision value and term magnitude with mpmath at ``dps`` digits."""
        with mpmath.workdps(dps):
            return _mp_value(self, point)

    # ---- tree view ----------------------------------------------------
    @property
    def kind(self) -> str:
        """Node kind of the canonical tree: const, symbol, func, power, product, sum."""
        if self.is_constant():
            return "const"
        if not self.den and len(self.num) > 1:
            return "sum"
        if not self.den:
            (m, c), = self.num.items()
            if c == 1 and len(m) == 1:
                a, e = m[0]
                if e == 1:
                    return "symbol" if a.__class__ is str else "func"
                return "power"
            return "product"
        if len(self.num) == 1 and len(self.den) == 1:
            (m, c), = self.num.items()
            if c == 1 and not m and self.den[0][1] >= 1:
                return "power"
        return "product"

    @property
    def args(self) -> tuple:
        """Children of the canonical tree node."""
        k = self.kind
        if k in ("const", "symbol"):
            return ()
        if k == "func":
            (m, _), = self.num.items()
            return (m[0][0].arg,)
        if k == "sum":
            return tuple(ScalarExpr({m: c}) for m, c in sorted(self.num.items()))
        if k == "power":
            if self.den:
                f, e = self.den[0]
                return (_plain(dict(f.poly)), const(-e))
            (m, _), = self.num.items()
            a, e = m[0]
            return (_atom_expr(a), const(e))
        # product
        out = []
        if len(self.num) > 1:
            out.append(_plain(dict(self.num)))
        else:
            (m, c), = self.num.items()
            if c != 1:
                out.append(const(c))
            for a, e in m:
                base = _atom_expr(a)
                out.append(base if e == 1 else ScalarExpr({((a, e),): mpq(1)}))
        for f, e in self.den:
            out.append(ScalarExpr({(): mpq(1)}, ((f, e),)))
        return tuple(out)

    # ---- printing -----------------------------------------------------
    def __str__(self):
        if not self.num:
            return "0"
        ns = _poly_str(self.num)
        if not self.den:
            return ns
        if len(self.num) > 1:
            ns = f"({ns})"
        parts = [ns]
        for f, e in self.den:
            fs = f"({_poly_str(f.poly)})"
            parts.append(fs if e == 1 else f"{fs}^{e}")
        return "/".join(parts)

    def __repr__(self):
        return f"ScalarExpr({self})"


def _plain(num: dict) -> ScalarExpr:
    return ScalarExpr(num) if num else ZERO


def _atom_expr(a) -> ScalarExpr:
    return ScalarExpr({((a, 1),): mpq(1)})


def _poly_atom_diff(p: dict, atom) -> dict:
    acc: dict = {}
    for m, c in p.items():
        for i, (a, e) in enumerate(m):
            if a == atom:
                if e == 1:
                    nm = m[:i] + m[i + 1:]
                else:
                    nm = m[:i] + ((a, e - 1),) + m[i + 1:]
                v = c * e
                s = acc.get(nm)
                if s is None:
                    acc[nm] = v
                else:
                    s += v
                    if s:
                        acc[nm] = s
                    else:
                        del acc[nm]
                break
    return acc


def _poly_diff(p: dict, v: str, deps) -> ScalarExpr:
    """d p / d v for a Laurent polynomial p, with chain rules for atoms."""
    direct: dict = {}
    # atoms whose derivative is a nontrivial expression
    chained: dict = {}
    for m, c in p.items():
        for i, (a, e) in enumerate(m):
            if a.__class__ is str:
                if a == v:
                    target = direct
                elif deps is not None and a in deps and v in deps[a]:
                    target = chained.setdefault(a, {})
                else:
                    continue
            else:
                if v not in a.arg.free_symbols and not (
                    deps and a.arg.free_symbols & deps.keys()
                ):
                    continue
                target = chained.setdefault(a, {})
            nm = m[:i] + m[i + 1:] if e == 1 else m[:i] + ((a, e - 1),) + m[i + 1:]
            val = c * e
            s = target.get(nm)
            if s is None:
                target[nm] = val
            else:
                s += val
                if s:
                    target[nm] = s
                else:
                    del target[nm]
    result = _plain(direct)
    for a, part in chained.items():
        if not part:
            continue
        if a.__class__ is str:
            da = deps[a][v]
        else:
            da = _func_derivative(a) * a.arg.diff(v, deps)
        if da.num:
            result = result + _plain(part) * da
    return result


def _func_derivative(a: FuncAtom) -> ScalarExpr:
    x = a.arg
    name = a.name
    if name == "sin":
        return cos(x)
    if name == "cos":
        return -sin(x)
    if name == "exp":
        return exp(x)
    if name == "ln":
        return x.inverse()
    if name == "sqrt":
        return ScalarExpr({((a, -1),): mpq(1, 2)})
    raise ValueError(name)


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


_FLOAT_FUNCS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
}


class _Evaluator:
    def __init__(self, point: Mapping[str, object]):
        self.point = point
        self.cache: dict = {}

    def atom(self, a):
        v = self.cache.get(a)
        if v is not None:
            return v
        if a.__class__ is str:
            v = self.point[a]
            v = mpq(v) if _is_exact(v) else float(v)
        else:
            x = self.value(a.arg)
            v = _apply_func(a.name, x)
        self.cache[a] = v
        return v

    def poly(self, p: dict):
        total = 0
        atom = self.atom
        for m, c in p.items():
            t = c
            for a, e in m:
                x = atom(a)
                if e < 0 and not x:
                    raise DomainError(f"division by zero at atom {a}")
                t = t * x ** e if e != 1 else t * x
            total = total + t
        return total

    def value(self, e: ScalarExpr):
        # promote to float consistently if any atom is inexact
        val = self.poly(e.num)
        for f, k in e.den:
            fv = self.poly(f.poly)
            if not fv:
                raise DomainError("denominator vanishes")
            val = val / fv ** k
        if _is_exact(val):
            return mpq(val)
        return float(val)

    def float_with_magnitude(self, e: ScalarExpr):
        val = 0.0
        mag = 0.0
        for m, c in e.num.items():
            t = float(c)
            for a, k in m:
                x = float(self.atom(a))
                if k < 0 and x == 0.0:
                    raise DomainError(f"division by zero at atom {a}")
                t *= x ** k
            val += t
            mag += abs(t)
        for f, k in e.den:
            fv = float(self.poly(f.poly))
            if fv == 0.0:
                raise DomainError("denominator vanishes")
            val /= fv ** k
            mag /= abs(fv) ** k
        return val, mag


_MP_FUNCS = {"sin": mpmath.sin, "cos": mpmath.cos, "exp": mpmath.exp, "ln": mpmath.log, "sqrt": mpmath.sqrt}


def _mp_value(e: "ScalarExpr", point: Mapping[str, object]):
    cache: dict = {}

    def atom(a):
        if a not in cache:
            if a.__class__ is str:
                v = point[a]
                q = mpq(v) if _is_exact(v) else None
                cache[a] = mpmath.mpf(int(q.numerator)) / int(q.denominator) if q is not None else mpmath.mpf(v)
            else:
                x, _ = _mp_value(a.arg, point)
                if (a.name == "sqrt" and x < 0) or (a.name == "ln" and x <= 0):
                    raise DomainError(f"{a.name} outside its domain")
                cache[a] = _MP_FUNCS[a.name](x)
        return cache[a]

    def poly(p):
        val, mag = mpmath.mpf(0), mpmath.mpf(0)
        for m, c in p.items():
            t = mpmath.mpf(int(c.numerator)) / int(c.denominator)
            for a, k in m:
                x = atom(a)
                if k < 0 and not x:
                    raise DomainError(f"division by zero at atom {a}")
                t = t * x ** k
            val += t
            mag += abs(t)
        return val, mag

    val, mag = poly(e.num)
    for f, k in e.den:
        fv, _ = poly(f.poly)
        if not fv:
            raise DomainError("denominator vanishes")
        val /= fv ** k
        mag /= abs(fv) ** k
    return val, mag


_MPQ = type(mpq(0))


def _is_exact(x) -> bool:
    return isinstance(x, (int, _MPQ)) or type(x).__name__ in ("Fraction", "mpz")


def _apply_func(name: str, x):
    if name == "sqrt":
        if x < 0:
            raise DomainError("sqrt of negative value")
        if _is_exact(x):
            q = mpq(x)
            if is_square(q.numerator) and is_square(q.denominator):
                return mpq(isqrt(q.numerator), isqrt(q.denominator))
        return math.sqrt(float(x))
    if name == "ln":
        if x <= 0:
            raise DomainError("ln of nonpositive value")
        if x == 1:
            return mpq(0)
        return math.log(float(x))
    if _is_exact(x) and x == 0:
        return mpq(1) if name in ("cos", "exp") else mpq(0)
    return _FLOAT_FUNCS[name](float(x))


# --------------------------------------------------------------------------
# printing helpers
# --------------------------------------------------------------------------


def _atom_str(a) -> str:
    if a.__class__ is str:
        return a
    return f"{a.name}({a.arg})"


def _coeff_str(c) -> str:
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _term_str(m: tuple, c) -> str:
    """Printed term without sign; c is |coefficient|."""
    up = [(a, e) for a, e in m if e > 0]
    down = [(a, -e) for a, e in m if e < 0]
    parts = []
    if c != 1 or not up:
        parts.append(_coeff_str(c))
    for a, e in up:
        s = _atom_str(a)
        parts.append(s if e == 1 else f"{s}^{e}")
    out = "*".join(parts)
    for a, e in down:
        s = _atom_str(a)
        out += "/" + (s if e == 1 else f"{s}^{e}")
    return out


def _poly_str(p: dict) -> str:
    if not p:
        return "0"
    pieces = []
    for i, (m, c) in enumerate(sorted(p.items())):
        neg = c < 0
        body = _term_str(m, -c if neg else c)
        if i == 0:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------


def const(q) -> ScalarExpr:
    q = mpq(q)
    if not q:
        return ZERO
    return ScalarExpr({(): q})


def sym(name: str) -> ScalarExpr:
    return ScalarExpr({((name, 1),): mpq(1)})


def symbols(names: str | Iterable[str]) -> list[ScalarExpr]:
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    return [sym(n) for n in names]


def as_expr(x) -> ScalarExpr:
    if isinstance(x, ScalarExpr):
        return x
    if isinstance(x, (int, mpq)) or type(x).__name__ in ("Fraction", "mpz"):
        return const(x)
    if isinstance(x, str):
        return sym(x)
    raise TypeError(f"cannot convert {type(x).__name__} to ScalarExpr")


def func(name: str, arg) -> ScalarExpr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    arg = as_expr(arg)
    if arg.is_constant():
        v = arg.constant_value()
        if name in ("sin",) and v == 0:
            return ZERO
        if name in ("cos", "exp") and v == 0:
            return ONE
        if name == "ln" and v == 1:
            return ZERO
        if name == "sqrt" and v >= 0 and is_square(v.numerator) and is_square(v.denominator):
            return const(mpq(isqrt(v.numerator), isqrt(v.denominator)))
    return _atom_expr(FuncAtom(name, arg))


def sin(x) -> ScalarExpr:
    return func("sin", x)


def cos(x) -> ScalarExpr:
    return func("cos", x)


def exp(x) -> ScalarExpr:
    return func("exp", x)


def ln(x) -> ScalarExpr:
    return func("ln", x)


def sqrt(x) -> ScalarExpr:
    return func("sqrt", x)


ZERO = ScalarExpr({})
ONE = ScalarExpr({(): mpq(1)})
