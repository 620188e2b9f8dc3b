#!/usr/bin/env python3
"""Test suite for diagnostics.py module."""

import numpy as np
import pytest

from diagnostics import OverlapCurve, d1, d1_curve, d2, d2_curve, d_xxz, d_xxz_curve, degeneracy_audit
from evolve import diagonalize


class TestOverlapCurve:
    """Test cases for OverlapCurve."""

    def test_j_over_l(self):
        """Abscissa runs (j+1)/L up to 1."""
        curve = OverlapCurve("d1", np.array([0.1, 0.5, 0.9, 1.0]))
        np.testing.assert_allclose(curve.j_over_l, [0.25, 0.5, 0.75, 1.0])
        assert curve.at(2) == 0.9

    def test_at_out_of_range(self):
        """j must lie in 0..L-1."""
        curve = OverlapCurve("d1", np.zeros(3))
        with pytest.raises(IndexError):
            curve.at(3)
        with pytest.raises(IndexError):
            curve.at(-1)


class TestSykOverlaps:
    """Test cases for d1 and d2."""

    @pytest.mark.parametrize("K", [0.01, 10.0])
    def test_completeness(self, syk_system, K):
        """Both curves end at 1."""
        basis, _, eig = syk_system(10, K=K, seed=5)
        assert d1(eig, basis, eig.dim - 1) == pytest.approx(1.0, abs=1e-8)
        assert d2(eig, basis, eig.dim - 1) == pytest.approx(1.0, abs=1e-8)

    def test_monotone(self, syk_system):
        """Cumulative weights never decrease."""
        basis, _, eig = syk_system(8, seed=2)
        for curve in (d1_curve(eig, basis), d2_curve(eig, basis)):
            assert np.all(np.diff(curve.values) >= -1e-15)
            assert curve.values[0] >= 0.0
            assert curve.size == eig.dim

    def test_tags(self, syk_system):
        """Curves carry their model tag."""
        basis, _, eig = syk_system(4)
        assert d1_curve(eig, basis).tag == "d1"
        assert d2_curve(eig, basis).tag == "d2"


class TestXxzOverlap:
    """Test cases for the XXZ overlap curve."""

    def test_completeness(self, xxz_system):
        """The full sum is the mean down-spin fraction 1/2 at S_z = 0."""
        basis, _, eig = xxz_system(6, W=0.5, seed=3)
        curve = d_xxz_curve(eig, basis)
        assert curve.size == 15
        assert curve.values[-1] == pytest.approx(0.5, abs=1e-8)
        assert np.all(np.diff(curve.values) >= -1e-15)
        assert d_xxz(eig, basis, curve.size - 1) == pytest.approx(0.5, abs=1e-8)

    def test_missing_raised_sector(self, xxz_system):
        """The fully polarized sector cannot be raised."""
        basis, _, eig = xxz_system(4)
        with pytest.raises(ValueError, match="must both be present"):
            d_xxz_curve(eig, basis, total_sz=2.0)

    def test_needs_sector_eigensystem(self, xxz_system):
        """A full-space eigensystem has no sector tags."""
        basis, _, eig = xxz_system(4)
        plain = diagonalize(eig.from_eigenbasis(np.diag(eig.energies)))
        with pytest.raises(ValueError, match="sector by sector"):
            d_xxz_curve(plain, basis)


class TestDegeneracyAudit:
    """Test cases for level-pairing audits."""

    def test_synthetic_levels(self):
        """Counting on a hand-made spectrum."""
        report = degeneracy_audit(np.array([0.0, 0.0, 1.0, 2.0, 2.0, 3.0]))
        assert (report.n_levels, report.n_paired) == (6, 4)
        assert report.tolerance == pytest.approx(3e-10)
        assert report.fraction_paired == pytest.approx(2 / 3)

    def test_empty(self):
        """No levels gives zero fraction."""
        assert degeneracy_audit(np.array([])).fraction_paired == 0.0

    def test_syk_n10_doubly_degenerate(self, syk_system):
        """N = 10, K = 0: every level is paired."""
        _, _, eig = syk_system(10, K=0.0, seed=1)
        assert degeneracy_audit(eig).fraction_paired == 1.0

    def test_syk_n12_doubly_degenerate(self, syk_system):
        """N = 12, K = 0: every level is paired."""
        _, _, eig = syk_system(12, K=0.0, seed=1)
        assert degeneracy_audit(eig).fraction_paired == 1.0

    def test_syk_n16_not_fully_paired(self, syk_system):
        """N = 16 is a multiple of eight and loses the pairing."""
        _, _, eig = syk_system(16, K=0.0, seed=1)
        assert degeneracy_audit(eig).fraction_paired < 1.0

    def test_quadratic_term_lifts_pairing(self, syk_system):
        """N = 12, K = 1: the pairing is broken."""
        _, _, eig = syk_system(12, K=1.0, seed=1)
        assert degeneracy_audit(eig).fraction_paired < 0.05
