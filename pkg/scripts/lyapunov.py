#!/usr/bin/env python3
"""
lyapunov.py - Quantum Lyapunov spectrum, OTOC exponent and KS entropy

For a set of time-evolved operators A_k(t) and fixed operators B_j the
transfer operators are

    M_kj(t) = A_k(t) B_j + sign * B_j A_k(t)

(SYK: A = B = psi, sign +1, an anticommutator. XXZ: A = sigma_+, B = sigma_-,
sign -1, a commutator). For a reference state |phi>

    L_ij(t) = sum_k <phi| M_ki(t)^dagger M_kj(t) |phi>

is Hermitian and positive semidefinite, equals the identity at t=0, and its
eigenvalues are e^{2 lambda_i t}.

Everything is evaluated in the energy eigenbasis: operators are rotated once
per sample and each time point only costs elementwise phases plus one batched
contraction over the selected reference states.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import curve_fit
from scipy.special import logsumexp

from evolve import EigenSystem, heisenberg, phase_evolved
from qops import MajoranaBasis, PauliOperator, SpinBasis, anticommutator, commutator

logger = logging.getLogger(__name__)

EIGENVALUE_FLOOR = 1e-14
NORM_TOLERANCE = 1e-10
SATURATION_FRACTIONS = (0.2, 0.8)
# complex entries held by one (n_ops, dim, states) work array
_CHUNK_ELEMENTS = 1 << 22


# =============================================================================
# Transfer operators
# =============================================================================


@dataclass(frozen=True)
class TransferOperators:
    """Evolved operators A_k, fixed operators B_j, and the sign of M_kj."""

    label: str
    evolved: tuple[PauliOperator, ...]
    fixed: tuple[PauliOperator, ...]
    sign: float

    @property
    def n(self) -> int:
        return len(self.evolved)


def syk_transfer_operators(basis: MajoranaBasis) -> TransferOperators:
    """M_ij(t) = {psi_i(t), psi_j(0)}."""
    return TransferOperators("syk", basis.paulis, basis.paulis, 1.0)


def xxz_transfer_operators(basis: SpinBasis) -> TransferOperators:
    """M_ij(t) = [sigma_{+,i}(t), sigma_{-,j}(0)]."""
    sites = range(1, basis.n_site + 1)
    raising = tuple(basis.pauli("+", s) for s in sites)
    lowering = tuple(basis.pauli("-", s) for s in sites)
    return TransferOperators("xxz", raising, lowering, -1.0)


@dataclass(frozen=True, eq=False)
class EigenbasisOperators:
    """Transfer operators rotated into (a subset of) the energy eigenbasis."""

    energies: np.ndarray
    columns: np.ndarray = field(repr=False)
    evolved: np.ndarray = field(repr=False)
    fixed: np.ndarray = field(repr=False)
    sign: float

    @property
    def n(self) -> int:
        return int(self.evolved.shape[0])

    def positions(self, states: Iterable[int]) -> np.ndarray:
        """Map eigenstate indices of the full EigenSystem onto local columns."""
        lookup = {int(c): p for p, c in enumerate(self.columns)}
        try:
            return np.array([lookup[int(s)] for s in states], dtype=np.int64)
        except KeyError as exc:
            msg = f"Eigenstate {exc.args[0]} is outside the retained columns"
            raise IndexError(msg) from exc


def _rotate(operators: Sequence[PauliOperator], basis: np.ndarray) -> np.ndarray:
    adjoint = basis.conj().T
    return np.stack([adjoint @ op.apply(basis) for op in operators])


def prepare_operators(ops: TransferOperators, eig: EigenSystem, columns: np.ndarray | None = None) -> EigenbasisOperators:
    """
    Rotate the transfer operators into the eigenbasis.

    `columns` keeps only those eigenvectors. This is exact whenever the
    retained subspace is closed under the operator products that act on the
    chosen reference states (e.g. S_z sectors s-1, s, s+1 for XXZ).
    """
    cols = np.arange(eig.dim) if columns is None else np.asarray(columns, dtype=np.int64)
    basis = eig.vectors[:, cols]
    evolved = _rotate(ops.evolved, basis)
    fixed = evolved if ops.fixed is ops.evolved else _rotate(ops.fixed, basis)
    logger.debug("Rotated %d %s operator pairs into %d eigenvectors", ops.n, ops.label, cols.size)
    return EigenbasisOperators(eig.energies[cols], cols, evolved, fixed, ops.sign)


def sector_columns(eig: EigenSystem, total_sz: float) -> np.ndarray:
    """Eigenvectors in sectors total_sz - 1, total_sz and total_sz + 1."""
    return np.sort(np.concatenate([eig.sector_indices(total_sz + shift) for shift in (-1.0, 0.0, 1.0)]))


def m_matrix_syk(basis: MajoranaBasis, eig: EigenSystem, i: int, j: int, t: float) -> np.ndarray:
    """Full-space {psi_i(t), psi_j(0)}."""
    psi_i = basis.operator(i)
    psi_j = basis.operator(j)
    return anticommutator(heisenberg(psi_i, eig, t), psi_j)


def m_matrix_xxz(basis: SpinBasis, eig: EigenSystem, i: int, j: int, t: float) -> np.ndarray:
    """Full-space [sigma_{+,i}(t), sigma_{-,j}(0)]; neither Hermitian nor anti-Hermitian."""
    raising = basis.operator("+", i)
    lowering = basis.operator("-", j)
    return commutator(heisenberg(raising, eig, t), lowering)


# =============================================================================
# L matrices
# =============================================================================


@dataclass(frozen=True, eq=False)
class LMatrix:
    t: float
    state_label: str
    entries: np.ndarray = field(repr=False)


def l_matrices(prepared: EigenbasisOperators, coefficients: np.ndarray, t: float) -> np.ndarray:
    """
    L^(phi)(t) for many reference states at once.

    Args:
        prepared: Operators in the eigenbasis
        coefficients: (m, s) matrix whose columns are the reference states
            expanded in the retained eigenvectors
        t: Time

    Returns:
        Array of shape (s, n, n)
    """
    n = prepared.n
    m = prepared.energies.shape[0]
    if coefficients.ndim != 2 or coefficients.shape[0] != m:
        msg = f"Expected coefficients of shape ({m}, s), got {coefficients.shape}"
        raise ValueError(msg)
    evolved_t = phase_evolved(prepared.evolved, prepared.energies, t)
    n_states = coefficients.shape[1]
    result = np.zeros((n_states, n, n), dtype=np.complex128)
    chunk = max(1, min(n_states, _CHUNK_ELEMENTS // max(1, n * m)))
    for start in range(0, n_states, chunk):
        block = coefficients[:, start : start + chunk]
        # u_j = B_j phi (time independent), w_k = A_k(t) phi
        fixed_on_state = prepared.fixed @ block
        evolved_on_state = evolved_t @ block
        accumulated = result[start : start + chunk]
        for k in range(n):
            transfer = evolved_t[k] @ fixed_on_state + prepared.sign * (prepared.fixed @ evolved_on_state[k])
            accumulated += np.einsum("iba,jba->aij", transfer.conj(), transfer, optimize=True)
    return result


def unit_coefficients(prepared: EigenbasisOperators, states: Iterable[int]) -> np.ndarray:
    """Coefficient columns for eigenstates given by their full-system index."""
    positions = prepared.positions(states)
    coefficients = np.zeros((prepared.energies.shape[0], positions.size), dtype=np.complex128)
    coefficients[positions, np.arange(positions.size)] = 1.0
    return coefficients


def l_matrix(ops: TransferOperators, eig: EigenSystem, state: int | np.ndarray, t: float) -> LMatrix:
    """
    L^(phi)(t) for one reference state.

    `state` is either an eigenstate index or a normalized state vector in the
    computational basis.

    Raises:
        ValueError: If a state vector is not normalized
        IndexError: If an eigenstate index is out of range
    """
    prepared = prepare_operators(ops, eig)
    if isinstance(state, (int, np.integer)):
        if not 0 <= int(state) < eig.dim:
            msg = f"Eigenstate index {state} out of range 0..{eig.dim - 1}"
            raise IndexError(msg)
        coefficients = unit_coefficients(prepared, [int(state)])
        label = f"eigenstate {int(state)}"
    else:
        vector = np.asarray(state, dtype=np.complex128)
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            msg = f"Reference state must be normalized (norm = {norm:.12g})"
            raise ValueError(msg)
        coefficients = (eig.vectors.conj().T @ vector)[:, None]
        label = "vector"
    return LMatrix(t, label, l_matrices(prepared, coefficients, t)[0])


# =============================================================================
# Exponents
# =============================================================================


@dataclass(frozen=True, eq=False)
class LyapunovRecord:
    """Sorted exponents and derived quantities for one (sample, state, t)."""

    t: float
    state_label: str
    lambdas: np.ndarray
    singular_values: np.ndarray = field(repr=False)
    h_ks: float
    lambda_otoc: float
    n_floored: int = 0

    @property
    def n(self) -> int:
        return int(self.lambdas.shape[0])

    @property
    def lambda_max(self) -> float:
        return float(self.lambdas[-1])


def _require_positive_time(t: float) -> None:
    if t <= 0:
        msg = f"Lyapunov exponents are undefined at t <= 0 (t = {t})"
        raise ValueError(msg)


def spectrum_from_l(lmat: LMatrix, eigenvalue_floor: float = EIGENVALUE_FLOOR) -> LyapunovRecord:
    """
    lambda_i = log(eig_i(L)) / (2t), sorted ascending.

    Eigenvalues below eigenvalue_floor * max eigenvalue are clamped before the
    logarithm and counted in `n_floored`.

    Raises:
        ValueError: If t <= 0
    """
    _require_positive_time(lmat.t)
    hermitian = 0.5 * (lmat.entries + lmat.entries.conj().T)
    values = scipy.linalg.eigvalsh(hermitian)
    largest = max(float(values[-1]), 0.0)
    threshold = eigenvalue_floor * largest if largest > 0 else np.finfo(float).tiny
    n_floored = int(np.count_nonzero(values < threshold))
    if n_floored:
        logger.warning("Floored %d L eigenvalue(s) at t=%g (%s)", n_floored, lmat.t, lmat.state_label)
    clamped = np.maximum(values, threshold)
    lambdas = np.log(clamped) / (2.0 * lmat.t)
    trace = float(np.real(np.trace(lmat.entries)))
    otoc = math.log(max(trace, threshold) / lmat.entries.shape[0]) / (2.0 * lmat.t)
    return LyapunovRecord(lmat.t, lmat.state_label, lambdas, np.sqrt(clamped), ks_entropy(lambdas), otoc, n_floored)


def lambda_otoc(source: LyapunovRecord | np.ndarray | Sequence[float], t: float | None = None) -> float:
    """
    e^{2 lambda_OTOC t} = (1/n) sum_i e^{2 lambda_i t}.

    A record already carries the value computed from the trace of L; for a
    bare set of exponents the mean is taken in log space.

    Raises:
        ValueError: If t <= 0
    """
    if isinstance(source, LyapunovRecord):
        _require_positive_time(source.t)
        return source.lambda_otoc
    if t is None:
        msg = "t is required when passing bare exponents"
        raise ValueError(msg)
    _require_positive_time(t)
    lambdas = np.asarray(source, dtype=float)
    return float((logsumexp(2.0 * lambdas * t) - math.log(lambdas.size)) / (2.0 * t))


def ks_entropy(source: LyapunovRecord | np.ndarray | Sequence[float]) -> float:
    """h_KS = sum of the strictly positive exponents."""
    lambdas = source.lambdas if isinstance(source, LyapunovRecord) else np.asarray(source, dtype=float)
    return float(np.sum(lambdas[lambdas > 0]))


def spectrum_width(record: LyapunovRecord) -> float:
    return float(record.lambdas[-1] - record.lambdas[0])


def aggregate_records(records: Sequence[LyapunovRecord], weights: np.ndarray | None = None, label: str = "eigenstate-averaged") -> LyapunovRecord:
    """
    Weighted average of per-state records taken at the same time.

    Sorted exponent vectors are averaged entrywise; h_KS and lambda_OTOC are
    the weighted means of the per-state values.
    """
    if not records:
        msg = "Cannot aggregate an empty set of records"
        raise ValueError(msg)
    t = records[0].t
    if any(r.t != t for r in records):
        msg = "Records must share the same time"
        raise ValueError(msg)
    w = np.full(len(records), 1.0 / len(records)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(records),) or np.any(w < 0) or not math.isclose(float(w.sum()), 1.0, rel_tol=1e-9):
        msg = "Weights must be non-negative, one per record, and sum to 1"
        raise ValueError(msg)
    lambdas = w @ np.stack([r.lambdas for r in records])
    return LyapunovRecord(
        t,
        label,
        lambdas,
        np.exp(lambdas * t),
        float(w @ np.array([r.h_ks for r in records])),
        float(w @ np.array([r.lambda_otoc for r in records])),
        sum(r.n_floored for r in records),
    )


# =============================================================================
# Reference-state policy
# =============================================================================

_SELECTION_PATTERN = re.compile(r"^\s*(all|ground|center|index|window|boltzmann)\s*(?:\(([^)]*)\))?\s*$")


@dataclass(frozen=True)
class StateSelection:
    """
    Which eigenstates serve as reference states, and how they are weighted.

    Forms: all, ground, center, index(i), window(lo,hi) with percentages of
    the sorted spectrum, boltzmann(T).
    """

    kind: str
    index: int | None = None
    lo: float | None = None
    hi: float | None = None
    temperature: float | None = None

    @classmethod
    def parse(cls, text: str) -> StateSelection:
        match = _SELECTION_PATTERN.match(text)
        if match is None:
            msg = f"Unrecognized state selection {text!r}"
            raise ValueError(msg)
        kind, raw_args = match.group(1), match.group(2)
        args = [a.strip() for a in raw_args.split(",")] if raw_args else []
        if kind in {"all", "ground", "center"}:
            if args:
                msg = f"State selection {kind!r} takes no arguments"
                raise ValueError(msg)
            return cls(kind)
        try:
            if kind == "index" and len(args) == 1:
                return cls(kind, index=int(args[0]))
            if kind == "window" and len(args) == 2:
                lo, hi = float(args[0]), float(args[1])
                if not 0 <= lo < hi <= 100:
                    msg = f"Window percentages must satisfy 0 <= lo < hi <= 100 (got {lo}, {hi})"
                    raise ValueError(msg)
                return cls(kind, lo=lo, hi=hi)
            if kind == "boltzmann" and len(args) == 1:
                temperature = float(args[0])
                if temperature <= 0:
                    msg = f"Temperature must be positive (got {temperature})"
                    raise ValueError(msg)
                return cls(kind, temperature=temperature)
        except ValueError as exc:
            msg = f"Bad state selection {text!r}: {exc}"
            raise ValueError(msg) from exc
        msg = f"Wrong number of arguments in state selection {text!r}"
        raise ValueError(msg)

    def __str__(self) -> str:
        if self.kind == "index":
            return f"index({self.index})"
        if self.kind == "window":
            return f"window({self.lo:g},{self.hi:g})"
        if self.kind == "boltzmann":
            return f"boltzmann({self.temperature:g})"
        return self.kind

    def resolve(self, energies: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Positions into `energies` (ascending) and normalized weights.

        Raises:
            IndexError: If index(i) is out of range or a window holds no state
        """
        count = energies.shape[0]
        if self.kind == "all":
            return np.arange(count), np.full(count, 1.0 / count)
        if self.kind == "boltzmann":
            assert self.temperature is not None
            log_w = -(energies - energies[0]) / self.temperature
            weights = np.exp(log_w - logsumexp(log_w))
            return np.arange(count), weights / weights.sum()
        if self.kind == "window":
            assert self.lo is not None and self.hi is not None
            rank = (np.arange(count) + 0.5) / count
            positions = np.flatnonzero((rank >= self.lo / 100.0) & (rank <= self.hi / 100.0))
            if positions.size == 0:
                msg = f"{self} selects no state out of {count}"
                raise IndexError(msg)
            return positions, np.full(positions.size, 1.0 / positions.size)
        position = {"ground": 0, "center": count // 2}.get(self.kind, self.index)
        assert position is not None
        if not 0 <= position < count:
            msg = f"{self} out of range 0..{count - 1}"
            raise IndexError(msg)
        return np.array([position]), np.array([1.0])


# =============================================================================
# Growth-curve analysis
# =============================================================================


def plateau_value(curve: np.ndarray, tail_fraction: float = 0.1) -> float:
    """Mean of the last `tail_fraction` of a growth curve (at least one point)."""
    values = np.asarray(curve, dtype=float)
    tail = max(1, int(round(tail_fraction * values.size)))
    return float(values[-tail:].mean())


def saturation_times(
    times: np.ndarray,
    curve: np.ndarray,
    fractions: Sequence[float] = SATURATION_FRACTIONS,
    plateau: float | None = None,
) -> dict[float, float | None]:
    """
    First time the curve reaches each fraction of its late-time plateau.

    Returns None for a fraction the curve never reaches.
    """
    values = np.asarray(curve, dtype=float)
    target = plateau_value(values) if plateau is None else plateau
    result: dict[float, float | None] = {}
    for fraction in fractions:
        reached = np.flatnonzero(values >= fraction * target)
        result[fraction] = float(times[reached[0]]) if reached.size else None
    return result


@dataclass(frozen=True)
class PowerLawFit:
    """curve(t) = A - B t^{-p}."""

    A: float
    B: float
    p: float
    rms_residual: float

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return self.A - self.B * np.power(t, -self.p)


def _power_law(t: np.ndarray, a: float, b: float, p: float) -> np.ndarray:
    return a - b * np.power(t, -p)


def late_time_power_law(times: np.ndarray, curve: np.ndarray, t_min: float | None = None) -> PowerLawFit:
    """
    Fit A - B t^{-p} to the late-time part of a growth curve (localized phase).

    Raises:
        ValueError: If fewer than four points lie at t >= t_min
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(curve, dtype=float)
    mask = t >= (t_min if t_min is not None else t[0])
    mask &= t > 0
    if np.count_nonzero(mask) < 4:
        msg = "Power-law fit needs at least four points with t > 0"
        raise ValueError(msg)
    t, y = t[mask], y[mask]
    guess = (float(y[-1]), float(max(y[-1] - y[0], 1e-6) * t[0] ** 0.5), 0.5)
    params, _ = curve_fit(_power_law, t, y, p0=guess, bounds=([-np.inf, -np.inf, 0.0], [np.inf, np.inf, 10.0]), maxfev=20000)
    a, b, p = (float(v) for v in params)
    residual = float(np.sqrt(np.mean((y - _power_law(t, a, b, p)) ** 2)))
    return PowerLawFit(a, b, p, residual)


@dataclass(frozen=True)
class ProfilePoint:
    """Per-eigenstate quantities against the normalized energy rank (i + 1/2)/L."""

    rank: float
    energy: float
    lambda_max: float
    lambda_otoc: float
    h_ks_per_n: float


def energy_profile(records: Sequence[LyapunovRecord], positions: np.ndarray, energies: np.ndarray) -> list[ProfilePoint]:
    """Energy-resolved lambda_n, lambda_OTOC and h_KS/n at a fixed time."""
    count = energies.shape[0]
    return [
        ProfilePoint((int(p) + 0.5) / count, float(energies[p]), r.lambda_max, r.lambda_otoc, r.h_ks / r.n)
        for r, p in zip(records, positions, strict=True)
    ]
