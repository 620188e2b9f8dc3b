#!/usr/bin/env python3
"""Test suite for evolve.py module."""

import math

import numpy as np
import pytest

from chaos_models import build_xxz
from evolve import diagonalize, diagonalize_sectors, evolve_state, heisenberg, phase_evolved

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def _taylor_propagator(hamiltonian: np.ndarray, t: float, order: int = 40) -> np.ndarray:
    """e^{-iHt} by truncated power series, for small ||H t||."""
    result = np.eye(hamiltonian.shape[0], dtype=complex)
    term = np.eye(hamiltonian.shape[0], dtype=complex)
    for k in range(1, order + 1):
        term = term @ (-1j * t * hamiltonian) / k
        result = result + term
    return result


class TestDiagonalize:
    """Test cases for full-space diagonalization."""

    def test_diagonal_matrix(self):
        """diag(3, 1, 2) gives energies (1, 2, 3)."""
        eig = diagonalize(np.diag([3.0, 1.0, 2.0]).astype(complex))
        np.testing.assert_allclose(eig.energies, [1.0, 2.0, 3.0])
        assert eig.spectral_width == pytest.approx(2.0)

    def test_pauli_x(self):
        """sigma_x has energies -1, 1 with eigenvectors (1, -+1)/sqrt(2)."""
        eig = diagonalize(SX)
        np.testing.assert_allclose(eig.energies, [-1.0, 1.0], atol=1e-15)
        ground = eig.vectors[:, 0] * np.exp(-1j * np.angle(eig.vectors[0, 0]))
        np.testing.assert_allclose(ground, [1 / math.sqrt(2), -1 / math.sqrt(2)], atol=1e-14)

    def test_reconstruction(self, random_hermitian):
        """V diag(E) V^dagger reproduces H."""
        hamiltonian = random_hermitian(12)
        eig = diagonalize(hamiltonian)
        np.testing.assert_allclose(eig.from_eigenbasis(np.diag(eig.energies)), hamiltonian, atol=1e-12)
        np.testing.assert_allclose(eig.vectors.conj().T @ eig.vectors, np.eye(12), atol=1e-12)

    def test_not_hermitian(self):
        """Non-Hermitian input is rejected."""
        with pytest.raises(ValueError, match="not Hermitian"):
            diagonalize(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_not_square(self):
        """Non-square input is rejected."""
        with pytest.raises(ValueError, match="square"):
            diagonalize(np.zeros((2, 3)))

    def test_results_read_only(self):
        """The eigensystem cannot be modified in place."""
        eig = diagonalize(SZ)
        with pytest.raises(ValueError):
            eig.energies[0] = 5.0


class TestDiagonalizeSectors:
    """Test cases for block diagonalization along S_z."""

    def test_matches_full_spectrum(self, xxz_system):
        """Block energies coincide with the full-space energies."""
        basis, fields, eig = xxz_system(6, W=1.0, seed=4)
        full = diagonalize(build_xxz(fields, basis))
        np.testing.assert_allclose(eig.energies, full.energies, atol=1e-12)

    def test_eigenvectors_stay_in_sector(self, xxz_system):
        """Every eigenvector has support only on its own S_z sector."""
        basis, _, eig = xxz_system(4)
        values = basis.sz_values()
        for column, label in enumerate(eig.sectors):
            outside = eig.vectors[values != label, column]
            assert np.max(np.abs(outside), initial=0.0) == 0.0

    def test_sector_bookkeeping(self, xxz_system):
        """Sector sizes are binomial and labels are listed in order."""
        _, _, eig = xxz_system(4)
        assert eig.sector_labels() == [-2.0, -1.0, 0.0, 1.0, 2.0]
        assert eig.sector_indices(0.0).size == 6
        assert eig.sector_indices(1.0).size == 4

    def test_leak_detected(self, random_hermitian):
        """A matrix that couples sectors is rejected."""
        with pytest.raises(ValueError, match="couples sector"):
            diagonalize_sectors(random_hermitian(4), np.array([0.0, 0.0, 1.0, 1.0]))

    def test_label_count(self):
        """One label per basis state is required."""
        with pytest.raises(ValueError, match="one sector label"):
            diagonalize_sectors(SZ, np.array([0.0]))

    def test_full_eigensystem_has_no_sectors(self):
        """sector_indices needs a sector-resolved eigensystem."""
        with pytest.raises(ValueError, match="sector by sector"):
            diagonalize(SZ).sector_indices(0.0)


class TestHeisenberg:
    """Test cases for operator evolution."""

    def test_time_zero_is_identity(self, random_hermitian):
        """O(0) = O."""
        hamiltonian = random_hermitian(6)
        operator = random_hermitian(6)
        np.testing.assert_array_equal(heisenberg(operator, diagonalize(hamiltonian), 0.0), operator)

    def test_precession(self):
        """H = sigma_z/2 rotates sigma_x into cos t sigma_x - sin t sigma_y."""
        eig = diagonalize(SZ / 2)
        sy = np.array([[0, -1j], [1j, 0]])
        t = 0.7
        np.testing.assert_allclose(heisenberg(SX, eig, t), math.cos(t) * SX - math.sin(t) * sy, atol=1e-14)

    def test_matches_taylor_series(self, random_hermitian):
        """Spectral evolution agrees with a 40-term Taylor propagator."""
        hamiltonian = random_hermitian(8) / 4
        operator = random_hermitian(8)
        t = 0.3
        propagator = _taylor_propagator(hamiltonian, t)
        expected = propagator.conj().T @ operator @ propagator
        np.testing.assert_allclose(heisenberg(operator, diagonalize(hamiltonian), t), expected, atol=1e-12)

    def test_group_property(self, random_hermitian):
        """O(t1 + t2) = (O(t1))(t2)."""
        eig = diagonalize(random_hermitian(6))
        operator = random_hermitian(6)
        combined = heisenberg(operator, eig, 1.1)
        stepped = heisenberg(heisenberg(operator, eig, 0.4), eig, 0.7)
        np.testing.assert_allclose(combined, stepped, atol=1e-12)

    def test_preserves_hermiticity_and_spectrum(self, random_hermitian):
        """Unitary evolution keeps O Hermitian with the same eigenvalues."""
        eig = diagonalize(random_hermitian(6))
        operator = random_hermitian(6)
        evolved = heisenberg(operator, eig, 2.5)
        np.testing.assert_allclose(evolved, evolved.conj().T, atol=1e-12)
        np.testing.assert_allclose(np.linalg.eigvalsh(evolved), np.linalg.eigvalsh(operator), atol=1e-12)

    def test_shape_mismatch(self):
        """Operators must live on the same Hilbert space."""
        with pytest.raises(ValueError, match="does not match"):
            heisenberg(np.eye(3), diagonalize(SZ), 1.0)

    def test_phase_evolved_broadcasts(self, random_hermitian):
        """A stack of operators evolves entrywise like each one alone."""
        eig = diagonalize(random_hermitian(5))
        stack = np.stack([eig.to_eigenbasis(random_hermitian(5)) for _ in range(3)])
        evolved = phase_evolved(stack, eig.energies, 0.9)
        for k in range(3):
            np.testing.assert_allclose(evolved[k], phase_evolved(stack[k], eig.energies, 0.9), atol=1e-15)


class TestEvolveState:
    """Test cases for state evolution."""

    def test_unitary(self, random_hermitian, rng):
        """The norm of a state is conserved."""
        eig = diagonalize(random_hermitian(8))
        state = rng.normal(size=8) + 1j * rng.normal(size=8)
        state /= np.linalg.norm(state)
        assert np.linalg.norm(evolve_state(state, eig, 3.7)) == pytest.approx(1.0, abs=1e-12)

    def test_eigenstate_phase(self, random_hermitian):
        """An eigenstate only acquires the phase e^{-iEt}."""
        eig = diagonalize(random_hermitian(6))
        state = eig.vectors[:, 2]
        np.testing.assert_allclose(evolve_state(state, eig, 1.3), np.exp(-1j * eig.energies[2] * 1.3) * state, atol=1e-12)

    def test_matrix_of_states(self, random_hermitian, rng):
        """Columns evolve independently."""
        eig = diagonalize(random_hermitian(4))
        states = rng.normal(size=(4, 3)).astype(complex)
        states /= np.linalg.norm(states, axis=0)
        evolved = evolve_state(states, eig, 0.5)
        for column in range(3):
            np.testing.assert_allclose(evolved[:, column], evolve_state(states[:, column], eig, 0.5), atol=1e-13)

    def test_rejects_unnormalized(self, random_hermitian):
        """Unnormalized input is refused, column by column."""
        eig = diagonalize(random_hermitian(4))
        with pytest.raises(ValueError, match="normalized"):
            evolve_state(np.full(4, 1.0 + 0j), eig, 0.5)
        states = np.eye(4, 2, dtype=complex)
        states[:, 1] *= 2.0
        with pytest.raises(ValueError, match="normalized"):
            evolve_state(states, eig, 0.0)

    def test_matches_taylor_series(self, random_hermitian, rng):
        """e^{-iHt} v agrees with the power series."""
        hamiltonian = random_hermitian(6) / 4
        state = rng.normal(size=6).astype(complex)
        state /= np.linalg.norm(state)
        expected = _taylor_propagator(hamiltonian, 0.5) @ state
        np.testing.assert_allclose(evolve_state(state, diagonalize(hamiltonian), 0.5), expected, atol=1e-12)
