"""Exact computations for abelian 3d mirror symmetry.

Layers, bottom to top: integer lattices (:mod:`lattice`), Laurent rings over
``Q[h, t]`` (:mod:`laurent`), the chart gluing of ``T*Ť`` (:mod:`gluing`),
abelian Coulomb branch algebras (:mod:`coulomb`), hypertoric charts
(:mod:`hypertoric`), toric brane mirrors and Lagrangians (:mod:`branes`) and
a batch CLI (:mod:`cli`).
"""

from .errors import *  # noqa: F401,F403
from .lattice import IntMatrix, gale_dual, smith_normal_form
from .laurent import CharLinearForm, FracElem, HPoly, LaurentElem, MPoly, RatFunc
from .gluing import ChartMap, build_phi, compose, glued_components, verify_cocycle
from .coulomb import CoulombElem, from_laurent, membership_all_charts, z_generator, z_mult

__version__ = "0.1.0"
