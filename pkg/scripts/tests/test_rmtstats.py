#!/usr/bin/env python3
"""
Test suite for rmtstats.py module.

Checks unfolding, spacing histograms and gap ratios on hand-made spectra
and on the synthetic GUE and Poisson reference ensembles.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from rmtstats import (
    R_GUE,
    R_POISSON,
    SpectrumEnsemble,
    UnfoldedGaps,
    UnfoldingError,
    gap_ratios,
    gue_surmise,
    poisson_density,
    r_statistic,
    reference_ensembles,
    spacing_histogram,
    surmise_cdf,
    surmise_distance,
    unfold,
    unfold_fixed_i,
    unfold_standard,
)


class TestSpectrumEnsemble:
    """Test cases for SpectrumEnsemble."""

    def test_from_spectra_sorts(self):
        """Spectra are sorted on the way in."""
        ensemble = SpectrumEnsemble.from_spectra([np.array([3.0, 1.0, 2.0]), np.array([0.0, 5.0, 4.0])], model="syk")
        np.testing.assert_array_equal(ensemble.samples, [[1.0, 2.0, 3.0], [0.0, 4.0, 5.0]])
        assert ensemble.metadata == {"model": "syk"}
        assert (ensemble.n_samples, ensemble.n_levels) == (2, 3)

    def test_unsorted_rejected(self):
        """Raw arrays must already be sorted."""
        with pytest.raises(ValueError, match="sorted ascending"):
            SpectrumEnsemble(np.array([[2.0, 1.0]]))

    def test_unequal_lengths(self):
        """All spectra share one length."""
        with pytest.raises(ValueError, match="same length"):
            SpectrumEnsemble.from_spectra([np.arange(3.0), np.arange(4.0)])

    def test_select_largest_three(self):
        """largest_three keeps the top three levels of every spectrum."""
        ensemble = SpectrumEnsemble(np.array([[0.0, 1.0, 2.0, 3.0, 4.0]]))
        selected = ensemble.select("largest_three")
        np.testing.assert_array_equal(selected.samples, [[2.0, 3.0, 4.0]])
        assert selected.metadata["selection"] == "largest_three"

    def test_select_upper_half(self):
        """upper_half keeps levels n//2 and above."""
        ensemble = SpectrumEnsemble(np.array([[0.0, 1.0, 2.0, 3.0]]))
        np.testing.assert_array_equal(ensemble.select("upper_half").samples, [[2.0, 3.0]])

    def test_select_unknown(self):
        """Unknown selections are rejected."""
        with pytest.raises(ValueError, match="Unknown gap selection"):
            SpectrumEnsemble(np.array([[0.0, 1.0, 2.0]])).select("middle")


class TestUnfoldStandard:
    """Test cases for polynomial unfolding."""

    def test_constant_spacing(self):
        """Equally spaced identical spectra unfold to unit gaps."""
        ensemble = SpectrumEnsemble(np.tile(np.arange(20.0) * 0.3, (5, 1)))
        gaps = unfold_standard(ensemble)
        np.testing.assert_allclose(gaps.gaps, 1.0, atol=1e-8)
        assert gaps.method == "standard"

    def test_uniform_levels(self):
        """Uniform levels on [0, 1] unfold to gaps that are the raw gaps times the count."""
        rng = np.random.default_rng(3)
        ensemble = SpectrumEnsemble(np.sort(rng.uniform(0.0, 1.0, size=(400, 30)), axis=1))
        gaps = unfold_standard(ensemble, degree=3)
        np.testing.assert_allclose(gaps.gaps, ensemble.gaps() * 30, rtol=0.05, atol=0.05)

    def test_semicircle_mean_gap(self):
        """GUE levels (semicircle density) unfold to mean gap 1 within 2%."""
        gaps = unfold_standard(reference_ensembles("gue", 60, 200, seed=4))
        assert gaps.mean == pytest.approx(1.0, abs=0.02)

    def test_degree_too_large(self):
        """The degree needs more distinct levels than coefficients."""
        ensemble = SpectrumEnsemble(np.tile(np.arange(5.0), (3, 1)))
        with pytest.raises(UnfoldingError) as excinfo:
            unfold_standard(ensemble, degree=10)
        assert excinfo.value.report["distinct_levels"] == 5


class TestUnfoldFixedI:
    """Test cases for fixed-i unfolding."""

    def test_duplicated_spectrum(self):
        """A spectrum repeated k times unfolds to all ones."""
        ensemble = SpectrumEnsemble(np.tile([0.0, 0.5, 2.0, 2.1], (4, 1)))
        np.testing.assert_allclose(unfold_fixed_i(ensemble).gaps, 1.0)

    def test_per_index_rescaling_invariance(self, rng):
        """Scaling gap i by c_i in every spectrum leaves the unfolded gaps unchanged."""
        levels = np.cumsum(rng.exponential(size=(50, 8)), axis=1)
        scales = np.array([1.0, 3.0, 0.2, 7.0, 1.5, 0.9, 4.0])
        rescaled = np.concatenate([levels[:, :1], levels[:, :1] + np.cumsum(np.diff(levels, axis=1) * scales, axis=1)], axis=1)
        original = unfold_fixed_i(SpectrumEnsemble(levels)).gaps
        np.testing.assert_allclose(unfold_fixed_i(SpectrumEnsemble(rescaled)).gaps, original, rtol=1e-8)

    def test_exponential_gaps_with_index_rates(self, rng):
        """Exponential gaps with index-dependent rates pool to exponential(1)."""
        rates = np.linspace(0.5, 20.0, 10)
        gaps = rng.exponential(size=(5000, 10)) / rates
        levels = np.concatenate([np.zeros((5000, 1)), np.cumsum(gaps, axis=1)], axis=1)
        unfolded = unfold_fixed_i(SpectrumEnsemble(levels))
        assert unfolded.mean == pytest.approx(1.0, abs=1e-12)
        assert surmise_distance(unfolded, "poisson") < 0.02

    def test_single_spectrum(self):
        """Per-index means need at least two spectra."""
        with pytest.raises(ValueError, match="at least two spectra"):
            unfold_fixed_i(SpectrumEnsemble(np.array([[0.0, 1.0, 2.0]])))

    def test_zero_mean_gap(self):
        """A gap index that is always zero is a degenerate ensemble."""
        ensemble = SpectrumEnsemble(np.array([[0.0, 1.0, 1.0], [0.0, 2.0, 2.0]]))
        with pytest.raises(UnfoldingError, match="Zero mean gap"):
            unfold_fixed_i(ensemble)

    def test_dispatch(self):
        """unfold() dispatches on the method name."""
        ensemble = SpectrumEnsemble(np.tile(np.arange(12.0), (3, 1)))
        assert unfold(ensemble, "fixed_i").method == "fixed_i"
        assert unfold(ensemble, "none").mean == pytest.approx(1.0)
        with pytest.raises(ValueError, match="Unknown unfolding"):
            unfold(ensemble, "spline")


class TestSpacingDistributions:
    """Test cases for histograms and reference densities."""

    def test_histogram_integrates_to_one(self, rng):
        """Density times bin width sums to one."""
        histogram = spacing_histogram(UnfoldedGaps(rng.exponential(size=(100, 10)), "none"), bins=20, s_max=10.0)
        assert np.sum(histogram.density * histogram.widths) == pytest.approx(1.0)
        assert histogram.centers[0] == pytest.approx(0.25)

    def test_empty_histogram(self):
        """An empty gap set cannot be histogrammed."""
        with pytest.raises(ValueError, match="empty"):
            spacing_histogram(np.array([]))

    @pytest.mark.parametrize("density", [gue_surmise, poisson_density])
    def test_reference_normalization(self, density):
        """Both reference densities have unit integral and unit mean."""
        assert quad(density, 0, np.inf)[0] == pytest.approx(1.0, abs=1e-9)
        assert quad(lambda s: s * density(s), 0, np.inf)[0] == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("kind", ["gue", "poisson"])
    def test_cdf_matches_density(self, kind):
        """The closed-form CDF integrates the density."""
        density = gue_surmise if kind == "gue" else poisson_density
        for s in (0.3, 1.0, 2.5):
            assert surmise_cdf(s, kind) == pytest.approx(quad(density, 0, s)[0], abs=1e-10)

    def test_unknown_reference(self):
        """Only GUE and Poisson references exist."""
        with pytest.raises(ValueError, match="Unknown reference kind"):
            surmise_cdf(1.0, "goe")

    def test_gue_two_by_two_matches_surmise(self):
        """2x2 GUE spacings follow the surmise within 2% (1e5 draws)."""
        ensemble = reference_ensembles("gue", 2, 100_000, seed=1)
        assert surmise_distance(unfold(ensemble, "none"), "gue") < 0.02

    def test_poisson_spacings(self):
        """Poisson spacings are far from the GUE surmise and close to exp(-s)."""
        gaps = unfold(reference_ensembles("poisson", 20, 2000, seed=2), "none")
        assert surmise_distance(gaps, "poisson") < 0.02
        assert surmise_distance(gaps, "gue") > 0.1


class TestRStatistic:
    """Test cases for the gap ratio."""

    def test_simple_triple(self):
        """Levels {0, 1, 3} have gaps (1, 2) and r = 0.5."""
        result = r_statistic(SpectrumEnsemble(np.array([[0.0, 1.0, 3.0]])))
        assert result.mean == 0.5
        assert result.n_triples == 1

    def test_equal_spacing(self):
        """Equally spaced levels give r = 1 exactly."""
        result = r_statistic(SpectrumEnsemble(np.arange(10.0)[None, :]))
        assert result.mean == 1.0
        assert result.n_triples == 8

    def test_zero_gaps_skipped(self):
        """Triples with both gaps zero are dropped."""
        ratios = gap_ratios(np.array([[0.0, 0.0, 1.0]]))
        np.testing.assert_array_equal(ratios, [0.0])

    def test_affine_invariance(self, rng):
        """lambda -> a lambda + b leaves every ratio unchanged."""
        levels = np.sort(rng.normal(size=(20, 12)), axis=1)
        base = r_statistic(SpectrumEnsemble(levels))
        shifted = r_statistic(SpectrumEnsemble(3.7 * levels - 11.0))
        assert shifted.mean == pytest.approx(base.mean, rel=1e-12)

    def test_largest_three(self):
        """largest_three uses only the two top gaps."""
        ensemble = SpectrumEnsemble(np.array([[0.0, 5.0, 6.0, 8.0], [0.0, 1.0, 2.0, 6.0]]))
        result = r_statistic(ensemble, "largest_three")
        assert result.n_triples == 2
        assert result.mean == pytest.approx((0.5 + 0.25) / 2)

    def test_fixed_i_option(self):
        """fixed_i unfolding is applied before forming ratios."""
        ensemble = SpectrumEnsemble(np.array([[0.0, 1.0, 3.0], [0.0, 1.0, 3.0]]))
        assert r_statistic(ensemble, unfolding="fixed_i").mean == 1.0

    def test_unsupported_unfolding(self):
        """Polynomial unfolding is not used for ratios."""
        with pytest.raises(ValueError, match="supports unfolding"):
            r_statistic(SpectrumEnsemble(np.arange(5.0)[None, :]), unfolding="standard")

    def test_too_few_levels(self):
        """A ratio needs three levels."""
        with pytest.raises(ValueError, match="at least three levels"):
            r_statistic(SpectrumEnsemble(np.array([[0.0, 1.0]])))

    def test_poisson_reference(self):
        """Poisson spectra give 2 ln 2 - 1 = 0.3863 within 0.003 at 1e5 triples."""
        result = r_statistic(reference_ensembles("poisson", 12, 10_000, seed=7))
        assert result.n_triples == 100_000
        assert result.mean == pytest.approx(R_POISSON, abs=0.003)
        assert R_POISSON == pytest.approx(0.3863, abs=1e-4)

    def test_gue_reference(self):
        """Interior GUE triples give about 0.5996."""
        ensemble = reference_ensembles("gue", 50, 2000, seed=8)
        interior = SpectrumEnsemble(ensemble.samples[:, 5:-5].copy())
        assert r_statistic(interior).mean == pytest.approx(R_GUE, abs=0.01)


class TestReferenceEnsembles:
    """Test cases for synthetic reference spectra."""

    def test_deterministic(self):
        """The same seed gives identical spectra."""
        a = reference_ensembles("gue", 6, 10, seed=5)
        b = reference_ensembles("GUE", 6, 10, seed=5)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_shapes_and_metadata(self):
        """count spectra of dim levels each."""
        ensemble = reference_ensembles("poisson", 7, 3, seed=1)
        assert (ensemble.n_samples, ensemble.n_levels) == (3, 7)
        assert ensemble.metadata == {"model": "poisson", "seed": 1}

    def test_gue_variance_convention(self):
        """Diagonal entries have unit variance: the trace has variance dim."""
        ensemble = reference_ensembles("gue", 4, 20_000, seed=3)
        traces = ensemble.samples.sum(axis=1)
        assert np.var(traces) == pytest.approx(4.0, rel=0.05)

    @pytest.mark.parametrize(("kind", "dim", "count"), [("gue", 1, 5), ("gue", 3, 0), ("goe", 3, 5)])
    def test_invalid_arguments(self, kind, dim, count):
        """Bad sizes or kinds are rejected."""
        with pytest.raises(ValueError):
            reference_ensembles(kind, dim, count, seed=0)

    def test_stderr(self):
        """Unfolded gaps report a standard error."""
        gaps = UnfoldedGaps(np.array([[1.0, 3.0]]), "none")
        assert gaps.stderr == pytest.approx(math.sqrt(2.0) / math.sqrt(2.0))
