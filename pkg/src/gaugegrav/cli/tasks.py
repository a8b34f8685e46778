"""Operations available to scenario tasks."""
from __future__ import annotations

import numpy as np
from gmpy2 import mpq

from .. import brst, lifts, spinor
from ..geometry import (
    MetricField,
    TensorField,
    TetradField,
    WorldConnection,
    christoffel,
    contorsion,
    curvature,
    decompose,
    metric_from_tetrad,
    nonmetricity,
    recompose,
    ricci,
    scalar_curvature,
    torsion,
)
from ..lifts import BaseVectorField
from ..reports import Report, number
from ..symexpr import PROVEN, ScalarExpr, ZeroVerdict, all_zero, as_expr
from ..variational import (
    LagrangianDensity,
    euler_lagrange,
    field_equations_HE,
    invariance_identities,
    komar_report,
    noether_identities,
    weak_conservation,
)

KIND_OF = {
    MetricField: "metric",
    TetradField: "tetrad",
    WorldConnection: "connection",
    BaseVectorField: "vectorfield",
    spinor.SpinorFieldExpr: "spinor",
    LagrangianDensity: "lagrangian",
}


class TaskError(ValueError):
    """A task that cannot run: unknown operation, wrong arguments."""


def kind_of(obj) -> str:
    for cls, name in KIND_OF.items():
        if isinstance(obj, cls):
            return name
    if isinstance(obj, TensorField):
        return "oneform" if obj.kinds == "l" else "tensor"
    if isinstance(obj, ScalarExpr):
        return "scalar"
    return type(obj).__name__


class Outcome:
    """What a task produced: a value (reusable through ``as``) and checks."""

    def __init__(self, value=None, report: Report | None = None, info: dict | None = None):
        self.value = value
        self.report = report or Report("")
        self.info = info or {}

    @property
    def identity(self) -> bool:
        return bool(self.report.checks)


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------


def render_value(v) -> dict | None:
    """Exact string form of a task value for reports."""
    if v is None:
        return None
    kind = kind_of(v)
    if isinstance(v, WorldConnection):
        return {"kind": kind, "components": _nonzero(v.components)}
    if isinstance(v, MetricField):
        return {"kind": kind, "components": _nonzero(v.g.components)}
    if isinstance(v, TensorField):
        return {"kind": kind, "index_kinds": v.kinds, "components": _nonzero(v.components)}
    if isinstance(v, spinor.SpinorFieldExpr):
        return {"kind": kind, "components": {str(i): {"re": str(c.re), "im": str(c.im)}
                                              for i, c in enumerate(v.components)}}
    if isinstance(v, spinor.SpinConnectionCoeffs):
        return {"kind": "spin_connection", "components": _nonzero(v.coeffs)}
    if isinstance(v, ScalarExpr):
        out = {"kind": kind, "expr": str(v)}
        if not v.free_symbols:
            out["number"] = number(v.evaluate({}))
        return out
    if isinstance(v, dict):
        return {"kind": "record", "fields": {k: number(x) if isinstance(x, (int, float)) else str(x)
                                              for k, x in v.items()}}
    return {"kind": kind, "repr": str(v)}


def _nonzero(arr: np.ndarray) -> dict:
    return {",".join(map(str, idx)): str(arr[idx]) for idx in np.ndindex(arr.shape) if as_expr(arr[idx]).num}


def components_of(v) -> list:
    """(label, expression) pairs used by ``expect = zero``."""
    if isinstance(v, WorldConnection):
        arr = v.components
    elif isinstance(v, MetricField):
        arr = v.g.components
    elif isinstance(v, TensorField):
        arr = v.components
    elif isinstance(v, spinor.SpinConnectionCoeffs):
        arr = v.coeffs
    elif isinstance(v, spinor.SpinorFieldExpr):
        out = []
        for i, c in enumerate(v.components):
            out += [(f"re{i}", as_expr(c.re)), (f"im{i}", as_expr(c.im))]
        return out
    elif isinstance(v, ScalarExpr):
        return [("value", v)]
    else:
        raise TaskError(f"cannot zero-test a {kind_of(v)}")
    return [(",".join(map(str, idx)), as_expr(arr[idx])) for idx in np.ndindex(arr.shape)]


def zero_verdict(chart, items, samples: int, seed: int) -> ZeroVerdict:
    exprs = [e for _, e in items]
    if all(not e.num for e in exprs):
        return ZeroVerdict(PROVEN)
    if chart is not None:
        return chart.zero_test(exprs, samples, seed, [lab for lab, _ in items])
    return all_zero(exprs, samples, seed, None, [lab for lab, _ in items])


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

OPS: dict = {}


def op(name: str, *kinds: str):
    def deco(fn):
        OPS[name] = (kinds, fn)
        return fn
    return deco


def _int(opts, key, default):
    try:
        return int(opts.get(key, default))
    except ValueError:
        raise TaskError(f"option {key} must be an integer") from None


@op("christoffel", "metric")
def _christoffel(g, **kw):
    return Outcome(christoffel(g))


@op("torsion", "connection")
def _torsion(G, **kw):
    return Outcome(torsion(G))


@op("curvature", "connection")
def _curvature(G, **kw):
    return Outcome(curvature(G))


@op("ricci", "connection")
def _ricci(G, **kw):
    return Outcome(ricci(G).unweighted)


@op("scalar_curvature", "metric")
def _scalar(g, **kw):
    return Outcome(scalar_curvature(christoffel(g), g))


@op("connection_scalar_curvature", "connection", "metric")
def _scalar2(G, g, **kw):
    return Outcome(scalar_curvature(G, g))


@op("nonmetricity", "connection", "metric")
def _nonmetricity(G, g, **kw):
    return Outcome(nonmetricity(G, g))


@op("contorsion", "connection", "metric")
def _contorsion(G, g, **kw):
    return Outcome(contorsion(G, g))


@op("splitting", "connection", "metric")
def _splitting(G, g, samples, seed, **kw):
    back = recompose(decompose(G, g), g)
    items = [(",".join(map(str, i)), back[i] - G[i]) for i in np.ndindex(G.components.shape)]
    rep = Report("splitting round trip")
    rep.add("recompose(decompose(G)) - G", zero_verdict(G.chart, items, samples, seed))
    return Outcome(None, rep)


@op("metric_from_tetrad", "tetrad")
def _mft(h, **kw):
    return Outcome(metric_from_tetrad(h))


@op("lift_bracket", "vectorfield", "vectorfield")
def _lift_bracket(X, Y, samples, seed, options, **kw):
    kind = options.get("kind", "sigma_c")
    if kind not in lifts.LIFTS:
        raise TaskError(f"unknown lift kind {kind!r}; choose from {', '.join(lifts.LIFTS)}")
    defect = lifts.morphism_defect(lifts.LIFTS[kind], X, Y)
    rep = Report(f"lift functoriality ({kind})")
    items = defect.all_components()
    rep.add("bracket(L(X), L(Y)) - L([X, Y])", zero_verdict(X.chart, items, samples, seed))
    return Outcome(None, rep)


@op("spin_connection", "connection", "tetrad")
def _spin(G, h, **kw):
    return Outcome(spinor.spin_connection(G, h))


@op("dirac", "connection", "tetrad", "spinor")
def _dirac(G, h, psi, **kw):
    return Outcome(spinor.dirac_operator(G, h, psi))


@op("rep_square", "tetrad", "oneform")
def _rep_square(h, t, samples, seed, **kw):
    R = spinor.square_identity_residual(h, t)
    items = []
    for i in range(4):
        for j in range(4):
            items += [(f"re{i}{j}", as_expr(R[i][j].re)), (f"im{i}{j}", as_expr(R[i][j].im))]
    rep = Report("rep(t)^2 - |t|^2 1")
    rep.add("square identity", zero_verdict(h.chart, items, samples, seed))
    return Outcome(None, rep)


@op("boost_equivariance", "connection", "tetrad", "spinor")
def _boost(G, h, psi, samples, seed, options, **kw):
    ch = as_expr_text(options.get("cosh", "5/4"))
    sh = as_expr_text(options.get("sinh", "3/4"))
    S, _, Lam = spinor.boost_spin_matrix(ch, sh)
    h2 = h.transformed(Lam)
    lhs = spinor.dirac_operator(G, h2, psi.transformed(S))
    rhs = spinor.dirac_operator(G, h, psi).transformed(S)
    rep = Report("boost equivariance")
    rep.add("D_{Lh}(S psi) - S D_h psi", zero_verdict(G.chart, components_of(lhs - rhs), samples, seed))
    return Outcome(None, rep)


def as_expr_text(s: str):
    from ..symexpr import parse

    v = parse(s, ()).evaluate({})
    return mpq(v)


@op("clifford")
def _clifford(gamma=None, **kw):
    return Outcome(None, clifford_report(gamma))


def clifford_report(gam=None) -> Report:
    gam = gam or spinor.gamma_basis()
    rep = Report("Clifford algebra")
    rep.add("anticommutators", _matrix_verdict(gam.clifford_residuals()))
    rep.add("generator action", _matrix_verdict(spinor.generator_action_residuals(gam)))
    rep.add("Lorentz algebra closure", _matrix_verdict(spinor.lorentz_algebra_residuals(gam)))
    return rep


def _matrix_verdict(residuals: dict) -> ZeroVerdict:
    from ..symexpr import NONZERO

    for key, M in residuals.items():
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                if not x.is_zero():
                    return ZeroVerdict(NONZERO, 0, {}, x, f"{key}[{i},{j}]")
    return ZeroVerdict(PROVEN)


@op("euler_lagrange", "lagrangian")
def _el(L, options, **kw):
    ho = options.get("higher_order", "false").lower() in ("1", "true", "yes")
    E = euler_lagrange(L, higher_order=ho)
    vals = {lab: as_expr(e) for lab, e in E.all()}
    return Outcome(None, info={"nonzero_components": sum(1 for e in vals.values() if e.num),
                               "components": len(vals)})


@op("field_equations_HE")
def _fe(samples, seed, options, **kw):
    dim = _int(options, "dim", 4)
    return Outcome(None, field_equations_HE(dim, samples, seed, options.get("mode", "auto"),
                                            options.get("lowering", "middle")))


@op("noether_identities", "lagrangian")
def _noether(L, samples, seed, options, **kw):
    return Outcome(None, noether_identities(L, samples, seed, options.get("mode", "auto")))


@op("invariance_identities", "lagrangian")
def _inv(L, samples, seed, options, **kw):
    return Outcome(None, invariance_identities(L, samples, seed, options.get("mode", "auto")))


@op("komar", "lagrangian")
def _komar(L, samples, seed, **kw):
    return Outcome(None, komar_report(L, samples, seed))


@op("weak_conservation", "lagrangian")
def _weak(L, seed, options, **kw):
    res = weak_conservation(L, _int(options, "points", 3), seed)
    return Outcome(res)


@op("nilpotency")
def _nil(options, **kw):
    dim = _int(options, "dim", 4)
    operator = options.get("operator", "brst")
    if operator not in ("brst", "gauge"):
        raise TaskError("operator must be brst or gauge")
    full = brst.nilpotency_check(dim, operator=operator)
    if operator == "gauge":
        return Outcome(None, info=_gauge_summary(full))
    rep = Report(full.title)
    bad = [c for c in full.checks if not c.ok]
    rep.add(f"all {len(full.checks)} generators", bad[0].verdict if bad else ZeroVerdict(PROVEN))
    return Outcome(None, rep)


def _gauge_summary(rep: Report) -> dict:
    bad = [c for c in rep.checks if not c.ok]
    out = {"generators": len(rep.checks), "nonzero": len(bad)}
    if bad:
        out["first_witness"] = f"{bad[0].name}: {bad[0].verdict}"
    return out
