"""Lattice Pauli operators, radial Coulomb channels and the Scott limit."""

from .lattice import (
    GaugeLattice,
    NegativeTrace,
    RelativisticHamiltonian,
    SpinorOperator,
    build_pauli_lattice,
    free_symbol_spectrum,
    kinetic_function,
    relativistic_hamiltonian,
    trace_neg,
)
