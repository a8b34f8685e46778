"""The ghost-extended gauge operator and its nilpotency.

Run: python demos/brst_tour.py
"""
from gaugegrav import brst
from gaugegrav.brst import V

u, s = brst.gauge_operator(2), brst.brst_operator(2)
print("u(s00)   =", u.apply(V("s00")))
print("s(c0)    =", s.apply(V("c0")))
print("u(u(s00)) vanishes:", u.apply(u.apply(V("s00"))).is_zero())
print("s(s(s00)) vanishes:", s.apply(s.apply(V("s00"))).is_zero())

rep = brst.nilpotency_check(2)
print(f"nilpotency on {len(rep.checks)} dim-2 generators:", "ok" if rep.ok else "FAILED")

LE = brst.extended_lagrangian(None, 2)
print("antifield part of the extended Lagrangian has ghost numbers", LE.ghost_numbers())
