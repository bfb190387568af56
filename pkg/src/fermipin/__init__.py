"""Exact diagonalization of few-fermion systems and pinning analysis of
natural occupation numbers against generalized Pauli constraints.

The package is organized as a pipeline:

``integrals``  one- and two-electron integrals (model builders, file I/O)
``fock``       determinants, layouts, configuration spaces
``ci``         Hamiltonian assembly, dense ground-state solves, rotations
``rdm``        one-particle reduced density matrices and natural occupations
``gpc``        generalized Pauli constraint catalogs and pinning reports
``selection``  super-selection filtering and force-pinned truncated solves
``cli``        the ``fermipin`` command-line front end
"""

from __future__ import annotations

__version__ = "0.1.0"

from . import ci, errors, fock, gpc, integrals, rdm, selection  # noqa: F401
