"""Scaled-norm / spectral-radius gap certification and roll-wave damping.

Subpackages:

* :mod:`rollgap.matgap` -- minimization of the diagonally scaled operator
  norm, maximization of the phase-modulated spectral radius, their gap, and
  the explicit example matrices.
* :mod:`rollgap.certify` -- variational certification of candidate
  minimizers via restricted Hermitian forms (definite combination vs common
  root).
* :mod:`rollgap.rollwave` -- inviscid Saint-Venant roll-wave profiles,
  characteristic data, high-frequency stability index and damping weights.
* :mod:`rollgap.dampsim` -- discrete linearized simulator measuring the
  exponential energy damping predicted by the stability index.
* :mod:`rollgap.genbal` -- general n x n hyperbolic balance-law layer built
  on user-supplied mode data.
* :mod:`rollgap.cli` -- command-line front end.
"""

__version__ = "0.1.0"
