"""Exact cyclotomic / p-adic machinery for group-ring valued zeta elements.

Subpackages are layered: ``exact`` (cyclotomic numbers, finite abelian
groups, group rings) -> ``field`` (quadratic fields, ideals, ray class
groups) -> ``shintani`` (cone decompositions, lattice sums, truncated
series) -> ``zeta`` (assembly of Theta/Phi elements and identity checks)
-> ``padic`` (bounded-precision local fields) -> ``regulator`` ->
``coleman`` -> ``cli``.
"""

__version__ = "0.1.0"
