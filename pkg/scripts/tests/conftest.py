"""
Shared pytest fixtures and utilities for test modules.

Small bases, seeded disorder samples and their eigensystems, reused across
the test files.
"""

import sys
from pathlib import Path
from unittest.mock import Mock

import numpy as np
import pytest

# Ensure `scripts/` is on sys.path for test imports
# This must be done before importing any local modules
_scripts = Path(__file__).resolve().parents[1]
if str(_scripts) not in sys.path:
    sys.path.insert(0, str(_scripts))

from chaos_models import build_syk, build_xxz, sample_syk_couplings, sample_xxz_fields  # noqa: E402
from evolve import diagonalize, diagonalize_sectors  # noqa: E402
from qops import build_spin_basis, jordan_wigner_majoranas  # noqa: E402


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return np.random.default_rng(20240521)


@pytest.fixture
def random_hermitian(rng):
    """Factory for random dense Hermitian matrices of a given dimension."""

    def _make(dim: int) -> np.ndarray:
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return (a + a.conj().T) / 2.0

    return _make


@pytest.fixture
def syk_system():
    """
    Factory for (basis, couplings, eigensystem) of one SYK sample.

    Usage:
        def test_something(syk_system):
            basis, couplings, eig = syk_system(8, K=0.01, seed=3)
    """

    def _make(n_majorana: int, *, J: float = 1.0, K: float = 0.01, seed: int = 1):
        basis = jordan_wigner_majoranas(n_majorana)
        couplings = sample_syk_couplings(n_majorana, J=J, K=K, seed=seed)
        return basis, couplings, diagonalize(build_syk(couplings, basis))

    return _make


@pytest.fixture
def xxz_system():
    """Factory for (basis, fields, sector-resolved eigensystem) of one XXZ sample."""

    def _make(n_site: int, *, W: float = 0.5, seed: int = 1):
        basis = build_spin_basis(n_site)
        fields = sample_xxz_fields(n_site, W=W, seed=seed)
        return basis, fields, diagonalize_sectors(build_xxz(fields, basis), basis.sz_values())

    return _make


@pytest.fixture
def mock_git_command_result():
    """Factory for mock CompletedProcess objects returned by git commands."""

    def _create_mock_result(output: str) -> Mock:
        mock_result = Mock()
        mock_result.stdout = output
        mock_result.returncode = 0
        mock_result.args = ["git"]
        return mock_result

    return _create_mock_result
