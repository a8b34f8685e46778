"""Dirac matrices, spin connections and the Dirac operator on a curved tetrad.

Run: python demos/spinor_tour.py
"""
import numpy as np

from gaugegrav import spinor as sp
from gaugegrav.geometry import Chart, TetradField, WorldConnection
from gaugegrav.symexpr import ZERO, parse

gam = sp.gamma_basis()
res = gam.clifford_residuals()
print(f"{len(res)} Clifford relations hold:", all(sp.mat_is_zero(M) for M in res.values()))
print("Lorentz algebra closes:", all(sp.mat_is_zero(M) for M in sp.lorentz_algebra_residuals(gam).values()))

ch = Chart(4)
psi = sp.SpinorFieldExpr.from_parts(ch, [("x0*x1", "x2"), ("x3^2", "0"), ("x1", "x0*x3"), ("1", "x2^2")])
flat = sp.dirac_operator(WorldConnection.zero(ch), TetradField.identity(ch), psi)
print("flat Dirac operator agrees with gamma^a d_a:", (flat - sp.flat_dirac(psi)).is_zero())

h = TetradField(ch, [[parse(e) for e in row] for row in
                     [["1 + x1^2", "0", "0", "0"], ["0", "1", "x0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "2"]]])
comps = np.full((4, 4, 4), ZERO, dtype=object)
comps[0, 1, 2] = parse("x3")
G = WorldConnection(ch, comps)

# a boost with rapidity cosh = 5/4, sinh = 3/4 acting on tetrad and spinor together
S, _, Lam = sp.boost_spin_matrix("5/4", "3/4")
lhs = sp.dirac_operator(G, h.transformed(Lam), psi.transformed(S))
rhs = sp.dirac_operator(G, h, psi).transformed(S)
print("Dirac operator is boost equivariant:", (lhs - rhs).is_zero())
