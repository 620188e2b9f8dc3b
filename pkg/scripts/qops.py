#!/usr/bin/env python3
"""
qops.py - Operator algebra on a chain of qubits

Builds Pauli matrices and their tensor-product embeddings, Jordan-Wigner
Majorana fermions, Dirac fermions, and spin raising/lowering operators.

Operators are stored as sums of signed Pauli strings and materialized as
dense complex matrices on demand. Site and mode labels are 1-based in every
public interface; site 1 is the leftmost tensor factor, i.e. the most
significant bit of a computational-basis index.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-12

_PAULI_MATRICES: dict[str, np.ndarray] = {
    "identity": np.eye(2, dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "+": np.array([[0, 1], [0, 0]], dtype=np.complex128),
    "-": np.array([[0, 0], [1, 0]], dtype=np.complex128),
}

_LABEL_ALIASES = {
    "i": "identity",
    "1": "identity",
    "id": "identity",
    "−": "-",  # unicode minus
    "plus": "+",
    "minus": "-",
}

PAULI_LABELS = tuple(_PAULI_MATRICES)


def normalize_label(pauli_label: str) -> str:
    """Map a Pauli label (with aliases) onto one of PAULI_LABELS."""
    label = pauli_label.strip().lower()
    label = _LABEL_ALIASES.get(label, label)
    if label not in _PAULI_MATRICES:
        msg = f"Unknown Pauli label {pauli_label!r}; expected one of {', '.join(PAULI_LABELS)}"
        raise ValueError(msg)
    return label


def pauli_matrix(pauli_label: str) -> np.ndarray:
    """Return a copy of the 2x2 matrix for a Pauli label."""
    return _PAULI_MATRICES[normalize_label(pauli_label)].copy()


def _sign_vector(dim: int, z_mask: int) -> np.ndarray:
    """(-1)^popcount(b & z_mask) for every basis index b."""
    masked = np.arange(dim, dtype=np.int64) & z_mask
    parity = np.zeros(dim, dtype=np.int64)
    while masked.any():
        parity ^= masked & 1
        masked >>= 1
    return 1 - 2 * parity


def _site_bit(site: int, n_site: int) -> int:
    if not 1 <= site <= n_site:
        msg = f"site {site} out of range 1..{n_site}"
        raise IndexError(msg)
    return 1 << (n_site - site)


@dataclass(frozen=True)
class PauliTerm:
    """coefficient * X^x_mask Z^z_mask (Z factor applied first)."""

    x_mask: int
    z_mask: int
    coefficient: complex


@dataclass(frozen=True)
class PauliOperator:
    """Linear combination of Pauli strings on `n_site` qubits."""

    n_site: int
    terms: tuple[PauliTerm, ...]

    @property
    def dim(self) -> int:
        return 1 << self.n_site

    @classmethod
    def from_terms(cls, n_site: int, terms: list[PauliTerm]) -> PauliOperator:
        """Combine like terms and drop vanishing ones."""
        combined: dict[tuple[int, int], complex] = {}
        for term in terms:
            key = (term.x_mask, term.z_mask)
            combined[key] = combined.get(key, 0.0) + term.coefficient
        kept = tuple(PauliTerm(x, z, c) for (x, z), c in sorted(combined.items()) if abs(c) > 1e-15)
        return cls(n_site, kept)

    def __matmul__(self, other: PauliOperator) -> PauliOperator:
        if other.n_site != self.n_site:
            msg = f"Operator size mismatch: {self.n_site} vs {other.n_site} sites"
            raise ValueError(msg)
        products: list[PauliTerm] = []
        for a in self.terms:
            for b in other.terms:
                # Z^za X^xb = (-1)^|za & xb| X^xb Z^za
                sign = -1.0 if (a.z_mask & b.x_mask).bit_count() % 2 else 1.0
                products.append(PauliTerm(a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask, sign * a.coefficient * b.coefficient))
        return PauliOperator.from_terms(self.n_site, products)

    def __add__(self, other: PauliOperator) -> PauliOperator:
        return PauliOperator.from_terms(self.n_site, [*self.terms, *other.terms])

    def scaled(self, factor: complex) -> PauliOperator:
        return PauliOperator(self.n_site, tuple(PauliTerm(t.x_mask, t.z_mask, factor * t.coefficient) for t in self.terms))

    def adjoint(self) -> PauliOperator:
        # (X^x Z^z)^dagger = Z^z X^x = (-1)^|x & z| X^x Z^z
        terms = [PauliTerm(t.x_mask, t.z_mask, np.conj(t.coefficient) * (-1.0 if (t.x_mask & t.z_mask).bit_count() % 2 else 1.0)) for t in self.terms]
        return PauliOperator.from_terms(self.n_site, terms)

    def accumulate_into(self, target: np.ndarray, scale: complex = 1.0) -> None:
        """Add scale * self to a dense dim x dim matrix in place."""
        columns = np.arange(self.dim, dtype=np.int64)
        for term in self.terms:
            rows = columns ^ term.x_mask
            target[rows, columns] += (scale * term.coefficient) * _sign_vector(self.dim, term.z_mask)

    def to_dense(self) -> np.ndarray:
        matrix = np.zeros((self.dim, self.dim), dtype=np.complex128)
        self.accumulate_into(matrix)
        return matrix

    def apply(self, array: np.ndarray) -> np.ndarray:
        """Return self @ array for a vector or a matrix with dim rows, without forming self."""
        if array.shape[0] != self.dim:
            msg = f"Operand has {array.shape[0]} rows, operator acts on dim {self.dim}"
            raise ValueError(msg)
        result = np.zeros(array.shape, dtype=np.complex128)
        rows = np.arange(self.dim, dtype=np.int64)
        trailing = (1,) * (array.ndim - 1)
        for term in self.terms:
            source = rows ^ term.x_mask
            weights = term.coefficient * _sign_vector(self.dim, term.z_mask)[source]
            result += weights.reshape(-1, *trailing) * array[source]
        return result


def pauli_operator(pauli_label: str, site: int, n_site: int) -> PauliOperator:
    """Pauli-string form of the single-site operator `pauli_label` at `site`."""
    label = normalize_label(pauli_label)
    bit = _site_bit(site, n_site)
    terms = {
        "identity": [PauliTerm(0, 0, 1.0)],
        "x": [PauliTerm(bit, 0, 1.0)],
        "z": [PauliTerm(0, bit, 1.0)],
        # Y = i X Z
        "y": [PauliTerm(bit, bit, 1j)],
        # (X + iY)/2 and (X - iY)/2
        "+": [PauliTerm(bit, 0, 0.5), PauliTerm(bit, bit, -0.5)],
        "-": [PauliTerm(bit, 0, 0.5), PauliTerm(bit, bit, 0.5)],
    }[label]
    return PauliOperator.from_terms(n_site, terms)


def site_operator(pauli_label: str, site: int, n_site: int) -> np.ndarray:
    """
    Embed a single-site Pauli operator into the 2^n_site dimensional space.

    Args:
        pauli_label: One of x, y, z, +, -, identity
        site: 1-based site index
        n_site: Number of sites

    Returns:
        Dense matrix 1 ⊗ ... ⊗ sigma ⊗ ... ⊗ 1 with sigma at `site`

    Raises:
        IndexError: If site is outside 1..n_site
        ValueError: If the label is unknown
    """
    if n_site < 1:
        msg = f"n_site must be positive (got {n_site})"
        raise ValueError(msg)
    return pauli_operator(pauli_label, site, n_site).to_dense()


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def hermiticity_error(matrix: np.ndarray) -> float:
    """Max-norm of A - A^dagger."""
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOLERANCE) -> bool:
    return matrix.ndim == 2 and matrix.shape[0] == matrix.shape[1] and hermiticity_error(matrix) < tol


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True)
class MajoranaBasis:
    """N Jordan-Wigner Majorana operators acting on 2^(N/2) states."""

    n_majorana: int
    paulis: tuple[PauliOperator, ...]

    @property
    def n_site(self) -> int:
        return self.n_majorana // 2

    @property
    def dim(self) -> int:
        return 1 << self.n_site

    def pauli(self, i: int) -> PauliOperator:
        if not 1 <= i <= self.n_majorana:
            msg = f"Majorana index {i} out of range 1..{self.n_majorana}"
            raise IndexError(msg)
        return self.paulis[i - 1]

    def operator(self, i: int) -> np.ndarray:
        """Dense psi_i (1-based)."""
        return self.pauli(i).to_dense()

    @cached_property
    def ops(self) -> tuple[np.ndarray, ...]:
        return tuple(_frozen(p.to_dense()) for p in self.paulis)

    def anticommutation_error(self) -> float:
        """Largest max-norm deviation of {psi_i, psi_j} from delta_ij * 1."""
        identity = np.eye(self.dim)
        worst = 0.0
        for i, a in enumerate(self.ops):
            for j in range(i, self.n_majorana):
                expected = identity if i == j else 0.0
                worst = max(worst, float(np.max(np.abs(anticommutator(a, self.ops[j]) - expected))))
        return worst


def jordan_wigner_majoranas(n_majorana: int) -> MajoranaBasis:
    """
    Build N Majorana operators through the Jordan-Wigner sigma_z string.

    psi_{2k-1} = (sigma_z^{⊗(k-1)} ⊗ sigma_x ⊗ 1 ...)/sqrt(2) and
    psi_{2k} = (sigma_z^{⊗(k-1)} ⊗ sigma_y ⊗ 1 ...)/sqrt(2), so that
    {psi_i, psi_j} = delta_ij.

    Raises:
        ValueError: If N is odd or smaller than 2
    """
    if n_majorana < 2 or n_majorana % 2:
        msg = f"Number of Majorana fermions must be even and >= 2 (got {n_majorana})"
        raise ValueError(msg)
    n_site = n_majorana // 2
    norm = 1.0 / math.sqrt(2.0)
    paulis: list[PauliOperator] = []
    string = 0
    for k in range(1, n_site + 1):
        bit = _site_bit(k, n_site)
        paulis.append(PauliOperator(n_site, (PauliTerm(bit, string, norm),)))
        paulis.append(PauliOperator(n_site, (PauliTerm(bit, string | bit, 1j * norm),)))
        string |= bit
    logger.debug("Built %d Jordan-Wigner Majoranas on %d sites", n_majorana, n_site)
    return MajoranaBasis(n_majorana, tuple(paulis))


class DiracMode(NamedTuple):
    annihilator: np.ndarray
    creator: np.ndarray


DIRAC_CONVENTIONS = ("standard", "alternate")


def dirac_from_majorana(basis: MajoranaBasis, convention: str = "standard") -> tuple[DiracMode, ...]:
    """
    Pair Majoranas into N/2 Dirac modes.

    "standard":  c_k = (psi_{2k-1} + i psi_{2k}) / sqrt(2)
    "alternate": c_k = (psi_{2k} - i psi_{2k-1}) / sqrt(2)

    Both satisfy {c_k, c_l^dagger} = delta_kl and {c_k, c_l} = 0 and share
    the same Fock vacuum up to a phase.
    """
    if convention not in DIRAC_CONVENTIONS:
        msg = f"Unknown Dirac convention {convention!r}; expected one of {DIRAC_CONVENTIONS}"
        raise ValueError(msg)
    norm = 1.0 / math.sqrt(2.0)
    modes: list[DiracMode] = []
    for k in range(1, basis.n_site + 1):
        odd, even = basis.pauli(2 * k - 1), basis.pauli(2 * k)
        if convention == "standard":
            c = (odd + even.scaled(1j)).scaled(norm)
        else:
            c = (even + odd.scaled(-1j)).scaled(norm)
        annihilator = _frozen(c.to_dense())
        modes.append(DiracMode(annihilator, _frozen(annihilator.conj().T.copy())))
    return tuple(modes)


@dataclass(frozen=True)
class SpinBasis:
    """Pauli and ladder operators for a chain of n_site spins-1/2."""

    n_site: int

    def __post_init__(self) -> None:
        if self.n_site < 1:
            msg = f"n_site must be positive (got {self.n_site})"
            raise ValueError(msg)

    @property
    def dim(self) -> int:
        return 1 << self.n_site

    def pauli(self, pauli_label: str, site: int) -> PauliOperator:
        return pauli_operator(pauli_label, site, self.n_site)

    def operator(self, pauli_label: str, site: int) -> np.ndarray:
        return site_operator(pauli_label, site, self.n_site)

    def _all_sites(self, label: str) -> tuple[np.ndarray, ...]:
        return tuple(_frozen(self.operator(label, s)) for s in range(1, self.n_site + 1))

    @cached_property
    def sigma_x(self) -> tuple[np.ndarray, ...]:
        return self._all_sites("x")

    @cached_property
    def sigma_y(self) -> tuple[np.ndarray, ...]:
        return self._all_sites("y")

    @cached_property
    def sigma_z(self) -> tuple[np.ndarray, ...]:
        return self._all_sites("z")

    @cached_property
    def sigma_plus(self) -> tuple[np.ndarray, ...]:
        return self._all_sites("+")

    @cached_property
    def sigma_minus(self) -> tuple[np.ndarray, ...]:
        return self._all_sites("-")

    def sz_values(self) -> np.ndarray:
        """S_z^(total) eigenvalue of every computational-basis state (bit 0 = up)."""
        states = np.arange(self.dim, dtype=np.int64)
        down = np.zeros(self.dim, dtype=np.int64)
        for shift in range(self.n_site):
            down += (states >> shift) & 1
        return (self.n_site - 2 * down) / 2.0

    @cached_property
    def s_z_total(self) -> np.ndarray:
        return _frozen(np.diag(self.sz_values()).astype(np.complex128))


def build_spin_basis(n_site: int) -> SpinBasis:
    return SpinBasis(n_site)
