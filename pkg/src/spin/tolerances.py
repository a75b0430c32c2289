"""
Numeric tolerances and dimension limits used across the package
"""

# Hermiticity is checked relative to the operator norm, unitarity absolutely
HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12

# Dense operators (Hamiltonian matrices, ideal gates, embed)
DENSE_LIMIT = 4096
# Full-propagator synthesis in simulate_sequence
PROPAGATOR_LIMIT = 1024
# State-vector evolution and materialised diagonal energies
STATE_LIMIT = 262144

# Lines closer than this are merged into one degenerate stick
MERGE_TOL_HZ = 1.0
# A pulse carrier must lie this close to a transition of the driven spin
CARRIER_WINDOW_HZ = 10e6
