#!/usr/bin/env python3
"""
entanglement.py - Entanglement growth of the SYK Fock vacuum

The Jordan-Wigner spin basis factorizes literally as H_|A| x H_{N/2-|A|}, with
Dirac mode k living on spin site k. The first |A| modes form subsystem A.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import entr
from scipy.stats import pearsonr

from evolve import EigenSystem, evolve_state
from qops import DiracMode

logger = logging.getLogger(__name__)

ENTROPY_FLOOR = 1e-14
TRACE_TOLERANCE = 1e-8
VACUUM_TOLERANCE = 1e-10
DEFAULT_KS_EE_WINDOW = (1.0, 2.0)


@dataclass(frozen=True)
class BipartitionSpec:
    """|A| Dirac modes kept out of `total_modes` = N/2."""

    subsystem_modes: int
    total_modes: int

    def __post_init__(self) -> None:
        if not 1 <= self.subsystem_modes <= self.total_modes - 1:
            msg = f"|A| must lie in 1..{self.total_modes - 1} (got {self.subsystem_modes})"
            raise ValueError(msg)

    @classmethod
    def default_for(cls, n_majorana: int) -> BipartitionSpec:
        """|A| = floor(N/4), half of the Dirac modes."""
        return cls(max(1, n_majorana // 4), n_majorana // 2)

    @property
    def dim_a(self) -> int:
        return 1 << self.subsystem_modes

    @property
    def dim_b(self) -> int:
        return 1 << (self.total_modes - self.subsystem_modes)


def fock_vacuum(modes: Sequence[DiracMode]) -> np.ndarray:
    """
    The normalized state annihilated by every c_k.

    Found as the ground state of the number operator sum_k c_k^dagger c_k; the
    global phase is fixed so the largest component is real and positive.

    Raises:
        ValueError: If no common null vector exists
    """
    if not modes:
        msg = "Need at least one Dirac mode"
        raise ValueError(msg)
    number = sum((m.creator @ m.annihilator for m in modes), np.zeros_like(modes[0].annihilator))
    _, vectors = scipy.linalg.eigh(number, subset_by_index=[0, 0])
    vacuum = vectors[:, 0]
    anchor = vacuum[np.argmax(np.abs(vacuum))]
    vacuum = vacuum * (abs(anchor) / anchor)
    residual = max(float(np.linalg.norm(m.annihilator @ vacuum)) for m in modes)
    if residual > VACUUM_TOLERANCE:
        msg = f"Dirac modes have no common vacuum (residual {residual:.3e})"
        raise ValueError(msg)
    return vacuum / np.linalg.norm(vacuum)


def _as_matrix(state: np.ndarray, spec: BipartitionSpec) -> np.ndarray:
    if state.shape != (spec.dim_a * spec.dim_b,):
        msg = f"State of shape {state.shape} does not fit {spec.total_modes} modes"
        raise ValueError(msg)
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > TRACE_TOLERANCE:
        msg = f"State must be normalized (norm = {norm:.12g})"
        raise ValueError(msg)
    return state.reshape(spec.dim_a, spec.dim_b)


def reduced_density(state: np.ndarray, spec: BipartitionSpec, keep: str = "A") -> np.ndarray:
    """Partial trace of |psi><psi| over the complement of `keep` ("A" or "B")."""
    psi = _as_matrix(state, spec)
    if keep == "A":
        return psi @ psi.conj().T
    if keep == "B":
        return psi.T @ psi.conj()
    msg = f"keep must be 'A' or 'B' (got {keep!r})"
    raise ValueError(msg)


def von_neumann(rho: np.ndarray, eigenvalue_floor: float = ENTROPY_FLOOR, base: float = math.e) -> float:
    """
    -sum p log p over eigenvalues p > eigenvalue_floor.

    Raises:
        ValueError: If the trace deviates from 1 by more than 1e-8
    """
    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        msg = f"Density matrix must have unit trace (got {trace:.12g})"
        raise ValueError(msg)
    probabilities = scipy.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    probabilities = probabilities[probabilities > eigenvalue_floor]
    return float(np.sum(entr(probabilities)) / math.log(base))


def entanglement_entropy(state: np.ndarray, spec: BipartitionSpec) -> float:
    """Same entropy from the Schmidt values of the bipartition."""
    schmidt = scipy.linalg.svdvals(_as_matrix(state, spec))
    probabilities = schmidt**2
    return float(np.sum(entr(probabilities[probabilities > ENTROPY_FLOOR])))


@dataclass(frozen=True, eq=False)
class EntropySeries:
    times: np.ndarray
    s_ee: np.ndarray
    subsystem_modes: int
    n_majorana: int

    @property
    def normalized(self) -> np.ndarray:
        """N * S_EE / |A|."""
        return self.n_majorana * self.s_ee / self.subsystem_modes


def entanglement_series(vacuum: np.ndarray, eig: EigenSystem, spec: BipartitionSpec, times: np.ndarray) -> EntropySeries:
    values = np.array([von_neumann(reduced_density(evolve_state(vacuum, eig, float(t)), spec)) for t in times])
    return EntropySeries(np.asarray(times, dtype=float), values, spec.subsystem_modes, 2 * spec.total_modes)


@dataclass(frozen=True, eq=False)
class KsEeComparison:
    """h_KS t against N S_EE/|A| on a shared grid, with the fitted constant shift."""

    times: np.ndarray
    hks_t: np.ndarray = field(repr=False)
    entropy: EntropySeries = field(repr=False)
    window: tuple[float, float]
    shift: float
    pearson_r: float
    shift_doubled_window: float

    @property
    def n_see_over_a(self) -> np.ndarray:
        return self.entropy.normalized


def _shift_and_correlation(times: np.ndarray, hks_t: np.ndarray, normalized: np.ndarray, window: tuple[float, float]) -> tuple[float, float]:
    inside = (times >= window[0]) & (times <= window[1])
    if not inside.any():
        return math.nan, math.nan
    # least-squares c in hks_t ~ normalized + c
    shift = float(np.mean(hks_t[inside] - normalized[inside]))
    if np.count_nonzero(inside) < 3 or np.ptp(hks_t[inside]) == 0 or np.ptp(normalized[inside]) == 0:
        return shift, math.nan
    return shift, float(pearsonr(hks_t[inside], normalized[inside]).statistic)


def ks_vs_ee_series(
    eig: EigenSystem,
    modes: Sequence[DiracMode],
    spec: BipartitionSpec,
    times: np.ndarray,
    hks_t: np.ndarray,
    window: tuple[float, float] = DEFAULT_KS_EE_WINDOW,
) -> KsEeComparison:
    """
    Pair h_KS t (eigenstate-averaged, same sample) with N S_EE/|A| of the
    evolved Fock vacuum.

    The shift over a window twice as long is reported alongside, as a
    stability diagnostic.
    """
    times = np.asarray(times, dtype=float)
    hks_t = np.asarray(hks_t, dtype=float)
    if hks_t.shape != times.shape:
        msg = "h_KS t series and time grid differ in length"
        raise ValueError(msg)
    entropy = entanglement_series(fock_vacuum(modes), eig, spec, times)
    shift, r = _shift_and_correlation(times, hks_t, entropy.normalized, window)
    doubled = (window[0], window[0] + 2.0 * (window[1] - window[0]))
    shift_doubled, _ = _shift_and_correlation(times, hks_t, entropy.normalized, doubled)
    logger.debug("KS vs EE: shift=%.6g r=%.4f over %s", shift, r, window)
    return KsEeComparison(times, hks_t, entropy, window, shift, r, shift_doubled)
