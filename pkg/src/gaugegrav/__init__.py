"""Exact symbolic toolkit for gauge gravitation theory on natural bundles.

Subpackages: ``symexpr`` (exact expressions), ``geometry`` (metrics,
tetrads, connections), ``lifts`` (functorial lifts of vector fields),
``variational`` (jet calculus and identities), ``brst`` (graded ghost
algebra), ``spinor`` (Clifford algebra and Dirac operator) and ``cli``.
"""

__version__ = "0.1.0"
