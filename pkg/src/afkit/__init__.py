"""Exact finite-depth machinery for AF-algebra classification data.

Submodules:
  ordgrp    simplicial groups, positive integer matrices, convex subgroups
  findim    finite-dimensional algebras, multiplicity matrices, scaled K0
  bratteli  labeled Bratteli diagrams, telescoping, generators, equivalence
  dimgroup  dimension-group certificates, limit semantics, Shen factoring
  elliott   two-tower intertwining witnesses
  perturb   exact perturbation moduli and the numeric matrix-unit layer
  cli       the afkit command-line front end
"""

__version__ = "0.1.0"
