#!/usr/bin/env python3
"""
rmtstats.py - Level statistics of Lyapunov spectra

Unfolding (polynomial fit of the pooled staircase, or per-index
normalization across disorder samples), nearest-neighbor spacing
histograms, gap-ratio statistics, and GUE/Poisson reference ensembles.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import erf
from scipy.stats import kstest, rankdata

from chaos_models import make_rng

logger = logging.getLogger(__name__)

R_GUE = 0.5996
R_POISSON = 2.0 * math.log(2.0) - 1.0
DEFAULT_UNFOLD_DEGREE = 10
GAP_SELECTIONS = ("all", "largest_three", "upper_half")
UNFOLDING_METHODS = ("fixed_i", "standard", "none")
REFERENCE_KINDS = ("gue", "poisson")
# condition number beyond which a staircase fit is rejected
_MAX_FIT_CONDITION = 1e12
_GUE_BATCH = 1000


class UnfoldingError(ValueError):
    """Raised when an unfolding cannot be carried out reliably."""

    def __init__(self, message: str, report: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.report = report or {}


@dataclass(frozen=True, eq=False)
class SpectrumEnsemble:
    """One sorted level sequence per (disorder sample, reference state), all the same length."""

    samples: np.ndarray = field(repr=False)
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if samples.ndim != 2:
            msg = f"Ensemble must be a 2-D array of spectra (got shape {samples.shape})"
            raise ValueError(msg)
        if np.any(np.diff(samples, axis=1) < 0):
            msg = "Every spectrum in the ensemble must be sorted ascending"
            raise ValueError(msg)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_spectra(cls, spectra: list[np.ndarray], **metadata: Any) -> SpectrumEnsemble:
        lengths = {len(s) for s in spectra}
        if len(lengths) > 1:
            msg = f"All spectra must have the same length (got {sorted(lengths)})"
            raise ValueError(msg)
        return cls(np.array([np.sort(s) for s in spectra], dtype=float), dict(metadata))

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[0])

    @property
    def n_levels(self) -> int:
        return int(self.samples.shape[1])

    def gaps(self) -> np.ndarray:
        return np.diff(self.samples, axis=1)

    def select(self, which: str) -> SpectrumEnsemble:
        """Restrict every spectrum to all levels, the largest three, or the upper half."""
        if which == "all":
            return self
        if which == "largest_three":
            if self.n_levels < 3:
                msg = f"Need at least three levels (have {self.n_levels})"
                raise ValueError(msg)
            kept = self.samples[:, -3:]
        elif which == "upper_half":
            kept = self.samples[:, self.n_levels // 2 :]
        else:
            msg = f"Unknown gap selection {which!r}; expected one of {GAP_SELECTIONS}"
            raise ValueError(msg)
        return SpectrumEnsemble(kept.copy(), {**self.metadata, "selection": which})


@dataclass(frozen=True, eq=False)
class UnfoldedGaps:
    """Normalized gaps, one row per spectrum."""

    gaps: np.ndarray = field(repr=False)
    method: str

    @property
    def pooled(self) -> np.ndarray:
        return self.gaps.ravel()

    @property
    def mean(self) -> float:
        return float(self.pooled.mean())

    @property
    def stderr(self) -> float:
        pooled = self.pooled
        return float(pooled.std(ddof=1) / math.sqrt(pooled.size)) if pooled.size > 1 else math.nan


def unfold_standard(ensemble: SpectrumEnsemble, degree: int = DEFAULT_UNFOLD_DEGREE) -> UnfoldedGaps:
    """
    Fit the pooled cumulative level density with a polynomial and map every
    level through it.

    The staircase counts levels per spectrum, so unfolded levels run from
    about 0 to n and their gaps average to 1.

    Raises:
        UnfoldingError: If the fit is rank deficient or badly conditioned
    """
    pooled = ensemble.samples.ravel()
    distinct = np.unique(pooled).size
    if degree < 1 or degree >= distinct:
        msg = f"Polynomial degree {degree} needs more than {degree} distinct levels (have {distinct})"
        raise UnfoldingError(msg, {"degree": degree, "distinct_levels": distinct})
    staircase = (rankdata(pooled, method="average") - 0.5) / ensemble.n_samples
    fit, (_, rank, singular_values, _) = Polynomial.fit(pooled, staircase, degree, full=True)
    condition = float(singular_values[0] / singular_values[-1]) if singular_values[-1] > 0 else math.inf
    report = {"degree": degree, "rank": int(rank), "condition": condition, "distinct_levels": distinct}
    if rank < degree + 1 or condition > _MAX_FIT_CONDITION:
        msg = f"Ill-conditioned staircase fit: {report}"
        raise UnfoldingError(msg, report)
    unfolded = fit(ensemble.samples)
    logger.debug("Standard unfolding: %s", report)
    return UnfoldedGaps(np.diff(unfolded, axis=1), "standard")


def _per_index_means(gaps: np.ndarray) -> np.ndarray:
    if gaps.shape[0] < 2:
        msg = f"Fixed-i unfolding needs at least two spectra (have {gaps.shape[0]})"
        raise ValueError(msg)
    means = gaps.mean(axis=0)
    if np.any(means <= 0):
        bad = np.flatnonzero(means <= 0).tolist()
        msg = f"Zero mean gap at index(es) {bad}: degenerate ensemble"
        raise UnfoldingError(msg, {"zero_mean_indices": bad})
    return means


def unfold_fixed_i(ensemble: SpectrumEnsemble) -> UnfoldedGaps:
    """
    g~_i = g_i / <g_i>, the mean taken over spectra at fixed gap index i.

    Raises:
        ValueError: With fewer than two spectra
        UnfoldingError: If some gap index has zero mean
    """
    gaps = ensemble.gaps()
    return UnfoldedGaps(gaps / _per_index_means(gaps), "fixed_i")


def unfold(ensemble: SpectrumEnsemble, method: str, degree: int = DEFAULT_UNFOLD_DEGREE) -> UnfoldedGaps:
    if method == "fixed_i":
        return unfold_fixed_i(ensemble)
    if method == "standard":
        return unfold_standard(ensemble, degree)
    if method == "none":
        gaps = ensemble.gaps()
        return UnfoldedGaps(gaps / gaps.mean(), "none")
    msg = f"Unknown unfolding {method!r}; expected one of {UNFOLDING_METHODS}"
    raise ValueError(msg)


# =============================================================================
# Spacing distributions
# =============================================================================


@dataclass(frozen=True, eq=False)
class SpacingHistogram:
    edges: np.ndarray
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)


def spacing_histogram(gaps: UnfoldedGaps | np.ndarray, bins: int = 40, s_max: float = 4.0) -> SpacingHistogram:
    """Normalized density histogram of P(s) on [0, s_max]."""
    values = gaps.pooled if isinstance(gaps, UnfoldedGaps) else np.ravel(gaps)
    if values.size == 0:
        msg = "Cannot histogram an empty set of gaps"
        raise ValueError(msg)
    density, edges = np.histogram(values, bins=bins, range=(0.0, s_max), density=True)
    return SpacingHistogram(edges, density)


def gue_surmise(s: np.ndarray | float) -> np.ndarray:
    """P(s) = (32/pi^2) s^2 exp(-4 s^2 / pi)."""
    s = np.asarray(s, dtype=float)
    return (32.0 / math.pi**2) * s**2 * np.exp(-4.0 * s**2 / math.pi)


def poisson_density(s: np.ndarray | float) -> np.ndarray:
    return np.exp(-np.asarray(s, dtype=float))


def surmise_cdf(s: np.ndarray | float, kind: str = "gue") -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if kind == "gue":
        return erf(2.0 * s / math.sqrt(math.pi)) - (4.0 * s / math.pi) * np.exp(-4.0 * s**2 / math.pi)
    if kind == "poisson":
        return 1.0 - np.exp(-s)
    msg = f"Unknown reference kind {kind!r}; expected one of {REFERENCE_KINDS}"
    raise ValueError(msg)


def surmise_distance(gaps: UnfoldedGaps | np.ndarray, kind: str = "gue") -> float:
    """Kolmogorov-Smirnov distance between the empirical and reference spacing CDFs."""
    values = gaps.pooled if isinstance(gaps, UnfoldedGaps) else np.ravel(gaps)

    def cdf(s: np.ndarray) -> np.ndarray:
        return surmise_cdf(s, kind)

    return float(kstest(values, cdf).statistic)


# =============================================================================
# Gap ratio
# =============================================================================


@dataclass(frozen=True)
class RStatistic:
    mean: float
    stderr: float
    n_triples: int


def gap_ratios(gaps: np.ndarray) -> np.ndarray:
    """min/max of consecutive gaps along each row; triples with two zero gaps are skipped."""
    left, right = gaps[:, :-1], gaps[:, 1:]
    upper = np.maximum(left, right)
    valid = upper > 0
    return np.minimum(left, right)[valid] / upper[valid]


def r_statistic(ensemble: SpectrumEnsemble, which_gaps: str = "all", unfolding: str = "none") -> RStatistic:
    """
    Mean gap ratio r_i = min(g_{i-1}, g_i) / max(g_{i-1}, g_i) with its standard error.

    `unfolding="fixed_i"` divides each gap by its per-index ensemble mean first.
    """
    selected = ensemble.select(which_gaps)
    if selected.n_levels < 3:
        msg = f"Gap ratios need at least three levels per spectrum (have {selected.n_levels})"
        raise ValueError(msg)
    gaps = selected.gaps()
    if unfolding == "fixed_i":
        gaps = gaps / _per_index_means(gaps)
    elif unfolding != "none":
        msg = f"r_statistic supports unfolding 'none' or 'fixed_i' (got {unfolding!r})"
        raise ValueError(msg)
    ratios = gap_ratios(gaps)
    if ratios.size == 0:
        return RStatistic(math.nan, math.nan, 0)
    stderr = float(ratios.std(ddof=1) / math.sqrt(ratios.size)) if ratios.size > 1 else 0.0
    return RStatistic(float(ratios.mean()), stderr, int(ratios.size))


# =============================================================================
# Reference ensembles
# =============================================================================


def reference_ensembles(kind: str, dim: int, count: int, seed: int) -> SpectrumEnsemble:
    """
    Synthetic spectra for GUE or Poisson comparison.

    GUE: Hermitian matrices with real diagonal entries of variance 1 and
    complex off-diagonal entries with E|H_ij|^2 = 1. Poisson: cumulative sums
    of unit-rate exponential gaps.
    """
    if dim < 2 or count < 1:
        msg = f"Need dim >= 2 and count >= 1 (got dim={dim}, count={count})"
        raise ValueError(msg)
    rng = make_rng(seed)
    kind = kind.lower()
    if kind == "poisson":
        levels = np.cumsum(rng.exponential(1.0, size=(count, dim)), axis=1)
    elif kind == "gue":
        levels = np.empty((count, dim))
        for start in range(0, count, _GUE_BATCH):
            size = min(_GUE_BATCH, count - start)
            g = (rng.normal(size=(size, dim, dim)) + 1j * rng.normal(size=(size, dim, dim))) / math.sqrt(2.0)
            levels[start : start + size] = np.linalg.eigvalsh((g + np.swapaxes(g.conj(), 1, 2)) / math.sqrt(2.0))
    else:
        msg = f"Unknown reference kind {kind!r}; expected one of {REFERENCE_KINDS}"
        raise ValueError(msg)
    logger.debug("Reference ensemble %s: %d spectra of %d levels (seed %d)", kind, count, dim, seed)
    return SpectrumEnsemble(levels, {"model": kind, "seed": seed})
