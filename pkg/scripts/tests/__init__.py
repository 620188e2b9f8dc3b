"""
Test package for the quantum Lyapunov laboratory.

Unit and property tests for the operator algebra, model builders, spectral
evolution, Lyapunov spectra, entanglement, diagnostics, level statistics and
the experiment harness. Desk-scale physics reproductions carry the
`acceptance` marker and are deselected by default.
"""
