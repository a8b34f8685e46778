"""Euler-Lagrange operators and the gauge identities of metric-affine Lagrangians.

Run: python demos/variational_tour.py  (the dim 2 checks take a few seconds)
"""
from gaugegrav.variational import JetContext, euler_lagrange, field_equations_HE, from_text, \
    hilbert_einstein, komar_report, noether_identities, yang_mills

ctx = JetContext(2)

# a toy Lagrangian in the connection jets
E = euler_lagrange(from_text(ctx, "1/2*k100_0^2"))
print("Euler-Lagrange of 1/2 (d_0 k)^2:", {lab: str(e) for lab, e in E.all() if e.num})

# Hilbert-Einstein: field equations and Noether identities, decided exactly in dim 2
for ch in field_equations_HE(2).checks:
    print(f"field equations / {ch.name}: {ch.verdict}")
for make in (hilbert_einstein, yang_mills):
    rep = noether_identities(make(ctx))
    print(make.__name__, "Noether identities:", [str(ch.verdict) for ch in rep.checks])
    print(make.__name__, "Komar superpotential:", [f"{ch.name}: {ch.verdict}" for ch in komar_report(make(ctx)).checks])

# a Lagrangian that is not a scalar density fails with a witness point
bad = noether_identities(from_text(ctx, "k000^2"))
for ch in bad.checks:
    if not ch.ok:
        print("broken Lagrangian:", ch.name, ch.verdict)
        break
