"""Symmetric equilibria and periodic orbits of identical point vortices on the sphere."""
from .catalog import EquilibriumRecord, catalog_for, classify_critical_point
from .dynamics import hamiltonian, integrate, momentum, vector_field
from .groups import FiniteRotationGroup, build_group
from .reduction import SymmetryScheme, embed, make_scheme, reduced_field, reduced_hamiltonian

__version__ = "0.1.0"

__all__ = [
    "EquilibriumRecord", "FiniteRotationGroup", "SymmetryScheme", "build_group", "catalog_for",
    "classify_critical_point", "embed", "hamiltonian", "integrate", "make_scheme", "momentum",
    "reduced_field", "reduced_hamiltonian", "vector_field",
]
