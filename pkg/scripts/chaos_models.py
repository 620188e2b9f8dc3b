#!/usr/bin/env python3
"""
chaos_models.py - Disorder realizations and Hamiltonians

Generalized SYK model (quartic Majorana couplings plus a random quadratic
deformation) and the isotropic XXZ chain with a random longitudinal field and
periodic boundary conditions.

Every realization is a pure function of its parameters and a 64-bit seed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

import numpy as np
from scipy.special import comb

from qops import MajoranaBasis, PauliOperator, SpinBasis

logger = logging.getLogger(__name__)

DEFAULT_J = 1.0
DEFAULT_K = 0.01

_SEED_MASK = (1 << 64) - 1


def derive_sample_seed(master_seed: int, sample_index: int) -> int:
    """
    Derive the 64-bit seed of one disorder sample.

    The seed depends only on (master_seed, sample_index), so samples are
    independent of each other and of the order in which they are computed.
    """
    digest = hashlib.sha256(f"lyaplab|{master_seed}|{sample_index}".encode()).digest()
    return int.from_bytes(digest[:8], "little") & _SEED_MASK


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for one realization."""
    return np.random.Generator(np.random.Philox(seed & _SEED_MASK))


@dataclass(frozen=True, eq=False)
class SykCouplings:
    """Quartic couplings J_ijkl (i<j<k<l) and quadratic couplings K_ij (i<j)."""

    n_majorana: int
    J: float
    K: float
    seed: int
    j_tensor: np.ndarray = field(repr=False)
    k_tensor: np.ndarray = field(repr=False)

    @property
    def quartic_indices(self) -> list[tuple[int, int, int, int]]:
        return list(combinations(range(1, self.n_majorana + 1), 4))

    @property
    def quadratic_indices(self) -> list[tuple[int, int]]:
        return list(combinations(range(1, self.n_majorana + 1), 2))


@dataclass(frozen=True, eq=False)
class XxzFields:
    """Random longitudinal fields w_i uniform on [-W, W]."""

    n_site: int
    W: float
    seed: int
    w: np.ndarray = field(repr=False)


def sample_syk_couplings(n_majorana: int, *, J: float = DEFAULT_J, K: float = DEFAULT_K, seed: int) -> SykCouplings:
    """Draw Gaussian couplings with standard deviations J and K."""
    if n_majorana < 2 or n_majorana % 2:
        msg = f"SYK needs an even number of Majoranas >= 2 (got {n_majorana})"
        raise ValueError(msg)
    if J < 0 or K < 0:
        msg = f"Coupling standard deviations must be non-negative (J={J}, K={K})"
        raise ValueError(msg)
    rng = make_rng(seed)
    n_quartic = int(comb(n_majorana, 4, exact=True))
    n_quadratic = int(comb(n_majorana, 2, exact=True))
    j_tensor = rng.normal(0.0, J, size=n_quartic) if J > 0 else np.zeros(n_quartic)
    k_tensor = rng.normal(0.0, K, size=n_quadratic) if K > 0 else np.zeros(n_quadratic)
    j_tensor.setflags(write=False)
    k_tensor.setflags(write=False)
    return SykCouplings(n_majorana, float(J), float(K), seed, j_tensor, k_tensor)


def sample_xxz_fields(n_site: int, *, W: float, seed: int) -> XxzFields:
    """Draw fields uniform on [-W, W]."""
    if n_site < 2:
        msg = f"XXZ chain needs at least 2 sites (got {n_site})"
        raise ValueError(msg)
    if W < 0:
        msg = f"Field half-width must be non-negative (got {W})"
        raise ValueError(msg)
    w = make_rng(seed).uniform(-W, W, size=n_site)
    w.setflags(write=False)
    return XxzFields(n_site, float(W), seed, w)


def build_syk(couplings: SykCouplings, basis: MajoranaBasis) -> np.ndarray:
    """
    Assemble H = sqrt(6/N^3) sum J_ijkl psi_i psi_j psi_k psi_l
               + (i/sqrt(N)) sum K_ij psi_i psi_j.

    Each product of Majoranas is a single Pauli string, accumulated straight
    into the dense matrix. N=2 has no quartic term.

    Raises:
        ValueError: If basis and couplings disagree on N
    """
    n = couplings.n_majorana
    if basis.n_majorana != n:
        msg = f"Basis has {basis.n_majorana} Majoranas, couplings have {n}"
        raise ValueError(msg)
    hamiltonian = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    quartic_scale = math.sqrt(6.0 / n**3)
    for value, (i, j, k, l) in zip(couplings.j_tensor, couplings.quartic_indices, strict=True):
        if value == 0.0:
            continue
        product = basis.pauli(i) @ basis.pauli(j) @ basis.pauli(k) @ basis.pauli(l)
        product.accumulate_into(hamiltonian, quartic_scale * value)
    quadratic_scale = 1j / math.sqrt(n)
    for value, (i, j) in zip(couplings.k_tensor, couplings.quadratic_indices, strict=True):
        if value == 0.0:
            continue
        (basis.pauli(i) @ basis.pauli(j)).accumulate_into(hamiltonian, quadratic_scale * value)
    logger.debug("Built SYK Hamiltonian N=%d seed=%d dim=%d", n, couplings.seed, basis.dim)
    return hamiltonian


def build_xxz(fields: XxzFields, basis: SpinBasis) -> np.ndarray:
    """
    Assemble H = sum_i [ (1/4) sigma_i . sigma_{i+1} + (w_i/2) sigma_{z,i} ]
    with sigma_{n+1} = sigma_1.
    """
    n = fields.n_site
    if basis.n_site != n:
        msg = f"Basis has {basis.n_site} sites, fields have {n}"
        raise ValueError(msg)
    if n < 2:
        msg = f"XXZ chain needs at least 2 sites (got {n})"
        raise ValueError(msg)
    hamiltonian = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for i in range(1, n + 1):
        j = i % n + 1
        bond: PauliOperator | None = None
        for label in ("x", "y", "z"):
            term = basis.pauli(label, i) @ basis.pauli(label, j)
            bond = term if bond is None else bond + term
        assert bond is not None
        bond.accumulate_into(hamiltonian, 0.25)
        basis.pauli("z", i).accumulate_into(hamiltonian, 0.5 * fields.w[i - 1])
    logger.debug("Built XXZ Hamiltonian n_site=%d W=%g seed=%d", n, fields.W, fields.seed)
    return hamiltonian


def sz_sector_mask(basis: SpinBasis, total_sz: float) -> np.ndarray:
    """
    Indices of computational-basis states with S_z^(total) = total_sz.

    Raises:
        ValueError: If the sector cannot be reached with n_site spins
    """
    doubled = 2.0 * total_sz
    n = basis.n_site
    if abs(doubled - round(doubled)) > 1e-9 or abs(doubled) > n or (n - round(doubled)) % 2:
        msg = f"S_z = {total_sz} is not reachable with {n} spins"
        raise ValueError(msg)
    return np.flatnonzero(np.isclose(basis.sz_values(), total_sz))


def sz_sectors(basis: SpinBasis) -> dict[float, np.ndarray]:
    """All reachable S_z sectors, keyed by their eigenvalue, ascending."""
    values = basis.sz_values()
    return {float(sz): np.flatnonzero(values == sz) for sz in np.unique(values)}


def couplings_to_json(realization: SykCouplings | XxzFields) -> dict[str, Any]:
    """JSON-ready record of one realization, for reproducibility audits."""
    if isinstance(realization, SykCouplings):
        return {
            "model": "syk",
            "N": realization.n_majorana,
            "J": realization.J,
            "K": realization.K,
            "seed": realization.seed,
            "j_tensor": realization.j_tensor.tolist(),
            "k_tensor": realization.k_tensor.tolist(),
        }
    return {
        "model": "xxz",
        "N": realization.n_site,
        "W": realization.W,
        "seed": realization.seed,
        "w": realization.w.tolist(),
    }


def couplings_from_json(payload: dict[str, Any] | str) -> SykCouplings | XxzFields:
    data = json.loads(payload) if isinstance(payload, str) else payload
    model = data.get("model")
    if model == "syk":
        j_tensor = np.asarray(data["j_tensor"], dtype=float)
        k_tensor = np.asarray(data["k_tensor"], dtype=float)
        j_tensor.setflags(write=False)
        k_tensor.setflags(write=False)
        return SykCouplings(int(data["N"]), float(data["J"]), float(data["K"]), int(data["seed"]), j_tensor, k_tensor)
    if model == "xxz":
        w = np.asarray(data["w"], dtype=float)
        w.setflags(write=False)
        return XxzFields(int(data["N"]), float(data["W"]), int(data["seed"]), w)
    msg = f"Unknown model in coupling record: {model!r}"
    raise ValueError(msg)
