"""Linear-optical Fock-state simulation with post-selection."""
