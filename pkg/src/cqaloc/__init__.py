"""Localization diagnostics for constrained quantum annealing of graph coloring.

Instantaneous ground states of ``H(s) = s*Hp + (1-s)*Hd`` restricted to the
one-color-per-node subspace, effective-field statistics, intra-chain
concurrence, and disordered-ring control experiments.
"""

__version__ = "0.1.0"
