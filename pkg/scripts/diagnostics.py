#!/usr/bin/env python3
"""
diagnostics.py - Perturbation-size and degeneracy diagnostics

Overlap curves measure how far in energy a local perturbation of the ground
state reaches; the degeneracy audit checks the pairing of SYK levels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from evolve import EigenSystem
from qops import MajoranaBasis, SpinBasis

logger = logging.getLogger(__name__)

DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class OverlapCurve:
    """Cumulative overlap weight d(j), j = 0..L-1."""

    tag: str
    values: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    @property
    def j_over_l(self) -> np.ndarray:
        return (np.arange(self.size) + 1.0) / self.size

    def at(self, j: int) -> float:
        if not 0 <= j < self.size:
            msg = f"j = {j} out of range 0..{self.size - 1}"
            raise IndexError(msg)
        return float(self.values[j])


def _overlap_weights(vectors: np.ndarray, perturbed: np.ndarray) -> np.ndarray:
    return np.abs(vectors.conj().T @ perturbed) ** 2


def d1_curve(eig: EigenSystem, basis: MajoranaBasis) -> OverlapCurve:
    """d1(j) = (2/N) sum_k sum_{i<=j} |<E_i|psi_k|E_0>|^2."""
    ground = eig.vectors[:, 0]
    weights = np.zeros(eig.dim)
    for k in range(1, basis.n_majorana + 1):
        weights += _overlap_weights(eig.vectors, basis.pauli(k).apply(ground))
    return OverlapCurve("d1", np.cumsum(weights) * 2.0 / basis.n_majorana)


def d2_curve(eig: EigenSystem, basis: MajoranaBasis) -> OverlapCurve:
    """d2(j) = (4/N) sum_k sum_{i<=j} |<E_i|psi_k psi_{k+1}|E_0>|^2, k+1 cyclic."""
    ground = eig.vectors[:, 0]
    n = basis.n_majorana
    weights = np.zeros(eig.dim)
    for k in range(1, n + 1):
        bilinear = basis.pauli(k) @ basis.pauli(k % n + 1)
        weights += _overlap_weights(eig.vectors, bilinear.apply(ground))
    return OverlapCurve("d2", np.cumsum(weights) * 4.0 / n)


def d_xxz_curve(eig: EigenSystem, basis: SpinBasis, total_sz: float = 0.0) -> OverlapCurve:
    """
    d(j) = (1/N_site) sum_k sum_{i<=j} |<E_i,s+1|sigma_k^+|E_0,s>|^2.

    The ground state of sector s is raised by one sigma^+ into sector s+1,
    whose eigenstates are enumerated in ascending energy.
    """
    source = eig.sector_indices(total_sz)
    target = eig.sector_indices(total_sz + 1.0)
    if source.size == 0 or target.size == 0:
        msg = f"Sectors {total_sz} and {total_sz + 1} must both be present"
        raise ValueError(msg)
    ground = eig.vectors[:, source[0]]
    raised_states = eig.vectors[:, target]
    weights = np.zeros(target.size)
    for site in range(1, basis.n_site + 1):
        weights += _overlap_weights(raised_states, basis.pauli("+", site).apply(ground))
    return OverlapCurve("d_xxz", np.cumsum(weights) / basis.n_site)


def d1(eig: EigenSystem, basis: MajoranaBasis, j: int) -> float:
    return d1_curve(eig, basis).at(j)


def d2(eig: EigenSystem, basis: MajoranaBasis, j: int) -> float:
    return d2_curve(eig, basis).at(j)


def d_xxz(eig: EigenSystem, basis: SpinBasis, j: int, total_sz: float = 0.0) -> float:
    return d_xxz_curve(eig, basis, total_sz).at(j)


@dataclass(frozen=True)
class DegeneracyReport:
    n_levels: int
    n_paired: int
    tolerance: float

    @property
    def fraction_paired(self) -> float:
        return self.n_paired / self.n_levels if self.n_levels else 0.0


def degeneracy_audit(energies: EigenSystem | np.ndarray, rel_tol: float = DEGENERACY_RTOL) -> DegeneracyReport:
    """Count levels with a neighbor closer than rel_tol * spectral width."""
    values = np.sort(energies.energies if isinstance(energies, EigenSystem) else np.asarray(energies, dtype=float))
    tolerance = rel_tol * float(values[-1] - values[0]) if values.size else 0.0
    close = np.diff(values) <= tolerance
    paired = np.zeros(values.size, dtype=bool)
    paired[:-1] |= close
    paired[1:] |= close
    report = DegeneracyReport(int(values.size), int(np.count_nonzero(paired)), tolerance)
    logger.debug("Degeneracy audit: %d/%d paired at tol %.3e", report.n_paired, report.n_levels, tolerance)
    return report
