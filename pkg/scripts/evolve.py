#!/usr/bin/env python3
"""
evolve.py - Exact diagonalization and spectral time evolution

Hermitian eigendecomposition (full space or block by block along a conserved
quantum number) and Heisenberg/Schrodinger evolution through the spectral
representation. One eigensolve per disorder sample; every time point reuses it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-10
SECTOR_LEAK_RTOL = 1e-12
NORM_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """
    Ascending energies and the unitary matrix whose columns are eigenvectors.

    `sectors` optionally tags every eigenvector with the quantum number of the
    block it was found in (S_z for the XXZ chain).
    """

    energies: np.ndarray
    vectors: np.ndarray = field(repr=False)
    sectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return int(self.energies.shape[0])

    @property
    def spectral_width(self) -> float:
        return float(self.energies[-1] - self.energies[0]) if self.dim else 0.0

    def to_eigenbasis(self, operator: np.ndarray, columns: np.ndarray | None = None) -> np.ndarray:
        """V^dagger O V, optionally restricted to a subset of eigenvector columns."""
        basis = self.vectors if columns is None else self.vectors[:, columns]
        return basis.conj().T @ operator @ basis

    def from_eigenbasis(self, operator: np.ndarray) -> np.ndarray:
        return self.vectors @ operator @ self.vectors.conj().T

    def sector_indices(self, label: float) -> np.ndarray:
        """Positions (in energy order) of the eigenvectors carrying `label`."""
        if self.sectors is None:
            msg = "Eigensystem was not built sector by sector"
            raise ValueError(msg)
        return np.flatnonzero(np.isclose(self.sectors, label))

    def sector_labels(self) -> list[float]:
        if self.sectors is None:
            return []
        return sorted({float(s) for s in np.round(self.sectors * 2.0) / 2.0})


def _check_hermitian(matrix: np.ndarray) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        msg = f"Expected a square matrix, got shape {matrix.shape}"
        raise ValueError(msg)
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    deviation = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if deviation > HERMITIAN_RTOL * scale:
        msg = f"Matrix is not Hermitian (max |H - H^dagger| = {deviation:.3e})"
        raise ValueError(msg)


def _readonly(*arrays: np.ndarray | None) -> None:
    for array in arrays:
        if array is not None:
            array.setflags(write=False)


def diagonalize(hamiltonian: np.ndarray) -> EigenSystem:
    """
    Full-space eigendecomposition of a Hermitian matrix.

    Raises:
        ValueError: If the matrix is not square or not Hermitian
    """
    _check_hermitian(hamiltonian)
    energies, vectors = scipy.linalg.eigh(hamiltonian)
    _readonly(energies, vectors)
    logger.debug("Diagonalized dim=%d, width=%.6g", energies.shape[0], energies[-1] - energies[0])
    return EigenSystem(energies, vectors)


def diagonalize_sectors(hamiltonian: np.ndarray, sector_labels: np.ndarray) -> EigenSystem:
    """
    Diagonalize block by block along a conserved quantity.

    `sector_labels[b]` is the quantum number of computational-basis state b.
    The blocks are assembled into one full-space EigenSystem sorted by energy,
    with `sectors` recording which block each eigenvector came from.

    Raises:
        ValueError: If the matrix is not Hermitian or couples different sectors
    """
    _check_hermitian(hamiltonian)
    labels = np.asarray(sector_labels)
    if labels.shape != (hamiltonian.shape[0],):
        msg = f"Need one sector label per basis state ({hamiltonian.shape[0]}), got {labels.shape}"
        raise ValueError(msg)

    dim = hamiltonian.shape[0]
    energies = np.empty(dim)
    vectors = np.zeros((dim, dim), dtype=np.complex128)
    sectors = np.empty(dim)
    scale = max(1.0, float(np.max(np.abs(hamiltonian))))
    start = 0
    for label in np.unique(labels):
        rows = np.flatnonzero(labels == label)
        outside = labels != label
        if outside.any():
            leak = float(np.max(np.abs(hamiltonian[np.ix_(rows, np.flatnonzero(outside))])))
            if leak > SECTOR_LEAK_RTOL * scale:
                msg = f"Hamiltonian couples sector {label} to other sectors (max leak {leak:.3e})"
                raise ValueError(msg)
        block_energies, block_vectors = scipy.linalg.eigh(hamiltonian[np.ix_(rows, rows)])
        stop = start + rows.size
        energies[start:stop] = block_energies
        vectors[rows, start:stop] = block_vectors
        sectors[start:stop] = label
        logger.debug("Sector %s: block dim %d", label, rows.size)
        start = stop

    order = np.argsort(energies, kind="stable")
    energies, vectors, sectors = energies[order], vectors[:, order], sectors[order]
    _readonly(energies, vectors, sectors)
    return EigenSystem(energies, vectors, sectors)


def phase_evolved(operator_eig: np.ndarray, energies: np.ndarray, t: float) -> np.ndarray:
    """
    Heisenberg evolution of an operator already written in the eigenbasis.

    Entry (b, c) picks up the phase e^{i(E_b - E_c)t}. Works on a stack of
    operators (leading axes broadcast).
    """
    phases = np.exp(1j * energies * t)
    return operator_eig * phases[:, None] * phases.conj()[None, :]


def heisenberg(operator: np.ndarray, eig: EigenSystem, t: float) -> np.ndarray:
    """O(t) = e^{iHt} O e^{-iHt} = V e^{iΛt} V^dagger O V e^{-iΛt} V^dagger."""
    if operator.shape != (eig.dim, eig.dim):
        msg = f"Operator shape {operator.shape} does not match Hilbert dimension {eig.dim}"
        raise ValueError(msg)
    if t == 0:
        return operator.copy()
    return eig.from_eigenbasis(phase_evolved(eig.to_eigenbasis(operator), eig.energies, t))


def evolve_state(state: np.ndarray, eig: EigenSystem, t: float) -> np.ndarray:
    """
    e^{-iHt} v. Also accepts a matrix whose columns are states.

    Raises:
        ValueError: If the dimension is wrong or a state is not normalized
    """
    if state.shape[0] != eig.dim:
        msg = f"State has {state.shape[0]} components, Hilbert dimension is {eig.dim}"
        raise ValueError(msg)
    norms = np.linalg.norm(state, axis=0)
    if np.any(np.abs(norms - 1.0) > NORM_TOLERANCE):
        msg = f"States must be normalized (norms {np.atleast_1d(norms).round(12).tolist()})"
        raise ValueError(msg)
    if t == 0:
        return state.astype(np.complex128, copy=True)
    coefficients = eig.vectors.conj().T @ state
    phases = np.exp(-1j * eig.energies * t)
    if coefficients.ndim == 1:
        return eig.vectors @ (phases * coefficients)
    return eig.vectors @ (phases[:, None] * coefficients)
