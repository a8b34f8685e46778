"""Walk through the connection calculus on the round 2-sphere and Schwarzschild.

Run: python demos/geometry_tour.py
"""
import numpy as np
from gmpy2 import mpq

from gaugegrav.geometry import Chart, MetricField, christoffel, curvature, decompose, nonmetricity, \
    recompose, scalar_curvature, torsion
from gaugegrav.symexpr import ZERO, parse


def diag(chart, entries, signature="lorentzian"):
    n = chart.dim
    return MetricField(chart, [[parse(entries[i]) if i == j else ZERO for j in range(n)] for i in range(n)],
                       signature=signature)


def show_nonzero(label, arr):
    print(label)
    for idx in np.ndindex(arr.shape):
        if arr[idx].num:
            print("  ", idx, arr[idx])


chart = Chart(2, ["th", "ph"], domain={"th": (mpq(1, 2), mpq(5, 2))})
g = diag(chart, ["1", "sin(th)^2"], "riemannian")
G = christoffel(g)
show_nonzero("sphere Christoffel symbols (leading-minus convention)", G.components)
print("torsion zero:", torsion(G).is_zero())
print("non-metricity zero:", nonmetricity(G, g).is_zero())
# the curvature sign convention makes the unit sphere come out at -2
print("scalar curvature:", scalar_curvature(G, g))
show_nonzero("sphere curvature", curvature(G).components)

chart = Chart(4, ["t", "r", "th", "ph"], ["m"], {"r": (3, 12), "m": (mpq(1, 4), 1), "th": (mpq(1, 2), 2)})
g = diag(chart, ["1 - 2*m/r", "-1/(1 - 2*m/r)", "-r^2", "-r^2*sin(th)^2"])
G = christoffel(g)
show_nonzero("Schwarzschild Christoffel symbols", G.components)
print("Schwarzschild scalar curvature:", scalar_curvature(G, g))

parts = decompose(G, g)
back = recompose(parts, g)
print("splitting round trip exact:", all(not (back[i] - G[i]).num for i in np.ndindex(G.components.shape)))
