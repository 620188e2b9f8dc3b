#!/usr/bin/env python3
"""
harness.py - Disorder-ensemble runner and command-line interface

Each disorder sample runs end to end in a spawned worker process (build,
diagonalize, per-task computations). Results are gathered, sorted by sample
index and written as CSV/JSON together with a checksummed manifest, so the
output depends only on the config and the master seed.

Usage:
    lyaplab run configs/syk_growth.toml --n-workers 4
    lyaplab validate configs/xxz_rmt.toml --set W=4.0
    lyaplab reference-ensembles gue 50 10000 7
"""

from __future__ import annotations

import argparse
import logging
import math
import multiprocessing
import os
import sys
import time
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor, as_completed
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from chaos_models import (
    build_syk,
    build_xxz,
    couplings_to_json,
    derive_sample_seed,
    sample_syk_couplings,
    sample_xxz_fields,
)
from diagnostics import DegeneracyReport, OverlapCurve, d1_curve, d2_curve, d_xxz_curve, degeneracy_audit
from entanglement import BipartitionSpec, KsEeComparison, ks_vs_ee_series
from evolve import EigenSystem, diagonalize, diagonalize_sectors
from experiment_config import (
    EXPONENT_TASKS,
    ConfigError,
    ConfigParseError,
    ConfigValidationError,
    ExperimentConfig,
    load_config,
    parse_override,
    require_valid,
    validate_config,
)
from lyapunov import (
    EigenbasisOperators,
    LMatrix,
    LyapunovRecord,
    ProfilePoint,
    TransferOperators,
    aggregate_records,
    energy_profile,
    l_matrices,
    late_time_power_law,
    plateau_value,
    prepare_operators,
    saturation_times,
    sector_columns,
    spectrum_from_l,
    spectrum_width,
    syk_transfer_operators,
    unit_coefficients,
    xxz_transfer_operators,
)
from qops import build_spin_basis, dirac_from_majorana, jordan_wigner_majoranas
from results_io import (
    CodeVersion,
    FailedSample,
    RunManifest,
    SampleSeed,
    inventory,
    load_manifest,
    write_csv,
    write_json,
    write_jsonl,
)
from rmtstats import (
    GAP_SELECTIONS,
    R_GUE,
    R_POISSON,
    REFERENCE_KINDS,
    SpectrumEnsemble,
    UnfoldingError,
    r_statistic,
    reference_ensembles,
    spacing_histogram,
    surmise_distance,
    unfold,
)

if TYPE_CHECKING:
    from subprocess_utils import ProjectRootNotFoundError, find_project_root, get_git_commit_hash
else:
    try:
        from subprocess_utils import ProjectRootNotFoundError, find_project_root, get_git_commit_hash
    except ModuleNotFoundError:
        from scripts.subprocess_utils import ProjectRootNotFoundError, find_project_root, get_git_commit_hash

logger = logging.getLogger(__name__)

PACKAGE_NAME = "quantum-lyapunov-lab"
_BLAS_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "VECLIB_MAXIMUM_THREADS", "NUMEXPR_NUM_THREADS")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


# =============================================================================
# Per-sample pipeline
# =============================================================================


@dataclass
class StateRecord:
    time_index: int
    state_index: int
    energy: float
    record: LyapunovRecord


@dataclass
class SampleResult:
    """Everything one worker produced for one disorder sample."""

    sample_index: int
    seed: int
    error: str | None = None
    couplings: dict[str, Any] = field(default_factory=dict)
    growth: list[LyapunovRecord] = field(default_factory=list)
    states: list[StateRecord] = field(default_factory=list)
    ks_ee: KsEeComparison | None = None
    overlaps: list[OverlapCurve] = field(default_factory=list)
    degeneracy: DegeneracyReport | None = None
    profile: list[tuple[int, ProfilePoint]] = field(default_factory=list)


@dataclass
class _SampleSystem:
    eig: EigenSystem
    ops: TransferOperators
    # eigenstates eligible as reference states (the S_z sector for XXZ)
    candidates: np.ndarray
    columns: np.ndarray | None
    basis: Any
    couplings: dict[str, Any]


def _build_system(config: ExperimentConfig, seed: int) -> _SampleSystem:
    if config.model == "syk":
        majoranas = jordan_wigner_majoranas(config.size)
        couplings = sample_syk_couplings(config.size, J=config.J, K=config.K, seed=seed)
        eig = diagonalize(build_syk(couplings, majoranas))
        return _SampleSystem(eig, syk_transfer_operators(majoranas), np.arange(eig.dim), None, majoranas, couplings_to_json(couplings))
    spins = build_spin_basis(config.size)
    fields = sample_xxz_fields(config.size, W=config.W, seed=seed)
    eig = diagonalize_sectors(build_xxz(fields, spins), spins.sz_values())
    columns = sector_columns(eig, config.total_sz) if config.sector_mode == "masked" else None
    return _SampleSystem(eig, xxz_transfer_operators(spins), eig.sector_indices(config.total_sz), columns, spins, couplings_to_json(fields))


def _records_for(prepared: EigenbasisOperators, states: np.ndarray, t: float, floor: float) -> list[LyapunovRecord]:
    stack = l_matrices(prepared, unit_coefficients(prepared, states), t)
    return [spectrum_from_l(LMatrix(t, f"eigenstate {s}", stack[a]), floor) for a, s in enumerate(states)]


def run_sample(config_data: dict[str, Any], sample_index: int) -> SampleResult:
    """Full pipeline for one disorder sample. Never raises: failures come back in `error`."""
    config = ExperimentConfig.from_mapping(config_data)
    seed = derive_sample_seed(config.master_seed, sample_index)
    result = SampleResult(sample_index, seed)
    try:
        _run_sample(config, result)
    except Exception as exc:  # noqa: BLE001  # reported per sample in the manifest
        logger.exception("Sample %d (seed %d) failed", sample_index, seed)
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def _run_sample(config: ExperimentConfig, result: SampleResult) -> None:
    tasks = set(config.tasks)
    system = _build_system(config, result.seed)
    result.couplings = {"sample_index": result.sample_index, **system.couplings}
    candidate_energies = system.eig.energies[system.candidates]
    positions, weights = config.selection().resolve(candidate_energies)
    selected = system.candidates[positions]
    label = str(config.selection())
    grid = config.time_grid()

    if tasks & EXPONENT_TASKS:
        audit = degeneracy_audit(candidate_energies)
        if audit.n_paired:
            logger.warning(
                "Sample %d: %d/%d levels paired within %.3e; per-state exponents depend on the basis chosen inside each pair",
                result.sample_index,
                audit.n_paired,
                audit.n_levels,
                audit.tolerance,
            )
        prepared = prepare_operators(system.ops, system.eig, system.columns)
        keep_states = bool(tasks & {"spectrum", "rmt"})
        for ti, t in enumerate(grid):
            records = _records_for(prepared, selected, float(t), config.eigenvalue_floor)
            result.growth.append(aggregate_records(records, weights, label))
            if keep_states:
                result.states.extend(
                    StateRecord(ti, int(s), float(system.eig.energies[s]), r) for s, r in zip(selected, records, strict=True)
                )
        if "profile" in tasks:
            every = np.arange(system.candidates.size)
            records = _records_for(prepared, system.candidates, config.profile_time, config.eigenvalue_floor)
            points = energy_profile(records, every, candidate_energies)
            result.profile = [(int(s), p) for s, p in zip(system.candidates, points, strict=True)]

    if "ks_ee" in tasks:
        modes = dirac_from_majorana(system.basis, config.dirac_convention)
        spec = BipartitionSpec(config.effective_subsystem_modes, config.size // 2)
        hks_t = np.array([r.h_ks * r.t for r in result.growth])
        result.ks_ee = ks_vs_ee_series(system.eig, modes, spec, grid, hks_t, config.ks_ee_window)

    if "diagnostics" in tasks:
        if config.model == "syk":
            result.overlaps = [d1_curve(system.eig, system.basis), d2_curve(system.eig, system.basis)]
            result.degeneracy = degeneracy_audit(system.eig)
        else:
            result.overlaps = [d_xxz_curve(system.eig, system.basis, config.total_sz)]
            result.degeneracy = degeneracy_audit(candidate_energies)
    logger.debug("Sample %d done", result.sample_index)


# =============================================================================
# Deterministic parallel execution
# =============================================================================


@contextmanager
def single_threaded_blas() -> Iterator[None]:
    """Pin BLAS/OpenMP to one thread in processes spawned inside the block."""
    saved = {name: os.environ.get(name) for name in _BLAS_THREAD_VARS}
    os.environ.update(dict.fromkeys(_BLAS_THREAD_VARS, "1"))
    try:
        yield
    finally:
        for name, value in saved.items():
            if value is None:
                os.environ.pop(name, None)
            else:
                os.environ[name] = value


def execute_samples(config: ExperimentConfig, indices: list[int]) -> list[SampleResult]:
    """
    Run samples in spawned worker processes and return them sorted by index.

    The pool is used even for one worker, so numerics never depend on the
    worker count.
    """
    payload = config.to_dict()
    results: list[SampleResult] = []
    context = multiprocessing.get_context("spawn")
    with single_threaded_blas(), ProcessPoolExecutor(max_workers=config.worker_count(), mp_context=context) as pool:
        futures = {pool.submit(run_sample, payload, i): i for i in indices}
        for future in as_completed(futures):
            index = futures[future]
            try:
                results.append(future.result())
            except Exception as exc:  # noqa: BLE001  # worker crash, recorded like any sample failure
                logger.exception("Worker for sample %d crashed", index)
                results.append(SampleResult(index, derive_sample_seed(config.master_seed, index), error=f"{type(exc).__name__}: {exc}"))
            logger.info("Sample %d/%d finished", len(results), len(indices))
    return sorted(results, key=lambda r: r.sample_index)


# =============================================================================
# Aggregation and output
# =============================================================================


def _lambda_columns(n: int) -> list[str]:
    return [f"lambda_{i}" for i in range(1, n + 1)]


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return math.nan, math.nan
    stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
    return float(values.mean()), stderr


def _write_growth(out: Path, config: ExperimentConfig, grid: np.ndarray, samples: list[SampleResult]) -> list[Path]:
    n = config.n_ops
    header = ["sample_index", "sample_seed", "state_selection", "t", *_lambda_columns(n), "h_ks", "lambda_otoc", "n_floored"]
    rows = [
        [s.sample_index, s.seed, r.state_label, r.t, *r.lambdas, r.h_ks, r.lambda_otoc, r.n_floored]
        for s in samples
        for r in s.growth
    ]
    written = [write_csv(out / "growth.csv", header, rows)]

    quantities = {
        "lambda_max_t": lambda r: r.lambda_max * r.t,
        "lambda_otoc_t": lambda r: r.lambda_otoc * r.t,
        "exp_2_lambda_otoc_t": lambda r: math.exp(2.0 * r.lambda_otoc * r.t),
        "h_ks_t": lambda r: r.h_ks * r.t,
        "spectrum_width": spectrum_width,
    }
    summary_header = ["t", "n_samples"]
    for name in quantities:
        summary_header += [f"{name}_mean", f"{name}_stderr"]
    means: dict[str, list[float]] = {name: [] for name in quantities}
    summary_rows = []
    for ti, t in enumerate(grid):
        at_t = [s.growth[ti] for s in samples]
        row: list[Any] = [float(t), len(at_t)]
        for name, fn in quantities.items():
            mean, stderr = _mean_stderr(np.array([fn(r) for r in at_t]))
            means[name].append(mean)
            row += [mean, stderr]
        summary_rows.append(row)
    written.append(write_csv(out / "growth_summary.csv", summary_header, summary_rows))

    summary: dict[str, Any] = {"n_samples": len(samples), "state_selection": config.state_selection}
    for name in ("lambda_otoc_t", "lambda_max_t", "exp_2_lambda_otoc_t"):
        curve = np.array(means[name])
        summary[name] = {
            "plateau": plateau_value(curve),
            "saturation_times": {f"{f:g}": v for f, v in saturation_times(grid, curve).items()},
        }
    try:
        late = grid >= 1.0
        fit = late_time_power_law(grid[late], np.array(means["lambda_otoc_t"])[late])
        summary["late_time_power_law"] = {"A": fit.A, "B": fit.B, "p": fit.p, "rms_residual": fit.rms_residual}
    except (ValueError, RuntimeError) as exc:
        logger.info("Skipping late-time power-law fit: %s", exc)
        summary["late_time_power_law"] = None
    written.append(write_json(out / "growth_summary.json", summary))
    return written


def _write_spectrum(out: Path, config: ExperimentConfig, grid: np.ndarray, samples: list[SampleResult]) -> list[Path]:
    header = ["sample_index", "sample_seed", "state_index", "energy", "t", *_lambda_columns(config.n_ops), "h_ks", "lambda_otoc", "n_floored"]
    rows = [
        [s.sample_index, s.seed, st.state_index, st.energy, float(grid[st.time_index]), *st.record.lambdas, st.record.h_ks, st.record.lambda_otoc, st.record.n_floored]
        for s in samples
        for st in s.states
    ]
    return [write_csv(out / "spectrum.csv", header, rows)]


def _write_rmt(out: Path, config: ExperimentConfig, grid: np.ndarray, samples: list[SampleResult]) -> list[Path]:
    r_rows: list[list[Any]] = []
    hist_rows: list[list[Any]] = []
    per_time: list[dict[str, Any]] = []
    r_unfolding = "fixed_i" if config.rmt_unfolding == "fixed_i" else "none"
    for ti, t in enumerate(grid):
        spectra = [st.record.lambdas for s in samples for st in s.states if st.time_index == ti]
        entry: dict[str, Any] = {"t": float(t), "n_spectra": len(spectra)}
        try:
            ensemble = SpectrumEnsemble.from_spectra(spectra, model=config.model, t=float(t), window=config.state_selection)
            r = r_statistic(ensemble, config.rmt_gaps, r_unfolding)
            gaps = unfold(ensemble.select(config.rmt_gaps), config.rmt_unfolding, config.unfold_degree)
            histogram = spacing_histogram(gaps, config.histogram_bins, config.histogram_max)
        except (UnfoldingError, ValueError) as exc:
            logger.warning("RMT statistics skipped at t=%g: %s", t, exc)
            entry["skipped"] = str(exc)
            per_time.append(entry)
            continue
        r_rows.append([float(t), r.mean, r.stderr, r.n_triples])
        hist_rows += [[float(t), c, d] for c, d in zip(histogram.centers, histogram.density, strict=True)]
        entry["ks_distance_gue"] = surmise_distance(gaps, "gue")
        entry["ks_distance_poisson"] = surmise_distance(gaps, "poisson")
        per_time.append(entry)
    metadata = {
        "model": config.model,
        "size": config.size,
        "state_selection": config.state_selection,
        "gaps": config.rmt_gaps,
        "unfolding": config.rmt_unfolding,
        "r_unfolding": r_unfolding,
        "unfold_degree": config.unfold_degree,
        "histogram_bins": config.histogram_bins,
        "histogram_max": config.histogram_max,
        "r_gue": R_GUE,
        "r_poisson": R_POISSON,
        "times": per_time,
    }
    return [
        write_csv(out / "r_series.csv", ["t", "r_mean", "r_stderr", "n_triples"], r_rows),
        write_csv(out / "ps_hist.csv", ["t", "bin_center", "density"], hist_rows),
        write_json(out / "rmt_metadata.json", metadata),
    ]


def _write_ks_ee(out: Path, config: ExperimentConfig, samples: list[SampleResult]) -> list[Path]:
    rows = []
    per_sample = []
    for s in samples:
        if s.ks_ee is None:
            continue
        comparison = s.ks_ee
        rows += [
            [s.sample_index, s.seed, t, see, nsee, hks]
            for t, see, nsee, hks in zip(comparison.times, comparison.entropy.s_ee, comparison.n_see_over_a, comparison.hks_t, strict=True)
        ]
        per_sample.append(
            {
                "sample_index": s.sample_index,
                "sample_seed": s.seed,
                "shift": comparison.shift,
                "pearson_r": comparison.pearson_r,
                "shift_doubled_window": comparison.shift_doubled_window,
            }
        )
    finite_r = np.array([p["pearson_r"] for p in per_sample if math.isfinite(p["pearson_r"])])
    summary = {
        "subsystem_modes": config.effective_subsystem_modes,
        "window": list(config.ks_ee_window),
        "dirac_convention": config.dirac_convention,
        "log_base": "e",
        "mean_pearson_r": float(finite_r.mean()) if finite_r.size else None,
        "samples": per_sample,
    }
    return [
        write_csv(out / "ks_ee.csv", ["sample_index", "sample_seed", "t", "s_ee", "n_see_over_a", "hks_t"], rows),
        write_json(out / "ks_ee_summary.json", summary),
    ]


def _write_diagnostics(out: Path, config: ExperimentConfig, samples: list[SampleResult]) -> list[Path]:
    rows = [
        [config.model, s.sample_index, s.seed, x, v, curve.tag]
        for s in samples
        for curve in s.overlaps
        for x, v in zip(curve.j_over_l, curve.values, strict=True)
    ]
    summary = {
        "samples": [
            {
                "sample_index": s.sample_index,
                "sample_seed": s.seed,
                "terminal_values": {c.tag: float(c.values[-1]) for c in s.overlaps},
                "degeneracy": None
                if s.degeneracy is None
                else {"fraction_paired": s.degeneracy.fraction_paired, "n_levels": s.degeneracy.n_levels, "tolerance": s.degeneracy.tolerance},
            }
            for s in samples
        ],
    }
    return [
        write_csv(out / "diagnostics.csv", ["model", "sample_index", "sample_seed", "j_over_L", "d_value", "tag"], rows),
        write_json(out / "diagnostics_summary.json", summary),
    ]


def _write_profile(out: Path, samples: list[SampleResult]) -> list[Path]:
    rows = [
        [s.sample_index, s.seed, state, p.rank, p.energy, p.lambda_max, p.lambda_otoc, p.h_ks_per_n]
        for s in samples
        for state, p in s.profile
    ]
    header = ["sample_index", "sample_seed", "state_index", "rank", "energy", "lambda_max", "lambda_otoc", "h_ks_per_n"]
    return [write_csv(out / "profile.csv", header, rows)]


def code_version() -> CodeVersion:
    try:
        package = version(PACKAGE_NAME)
    except PackageNotFoundError:
        package = "unknown"
    info = CodeVersion(package=package)
    try:
        commit = get_git_commit_hash(find_project_root())
    except ProjectRootNotFoundError:
        commit = None
    if commit:
        info["git_commit"] = commit
    return info


def run_experiment(config: ExperimentConfig) -> RunManifest:
    """
    Run every sample, write the task outputs and the manifest.

    Raises:
        ConfigValidationError: If the config has violations
    """
    require_valid(config)
    started = time.perf_counter()
    out = config.resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    grid = config.time_grid()
    indices = list(range(config.n_samples))
    logger.info("Running %s N=%d: %d samples on %d worker(s)", config.model, config.size, len(indices), config.worker_count())

    results = execute_samples(config, indices)
    ok = [r for r in results if r.error is None]
    failed = [FailedSample(sample_index=r.sample_index, seed=r.seed, error=r.error or "") for r in results if r.error is not None]
    for failure in failed:
        logger.warning("Sample %d failed: %s", failure["sample_index"], failure["error"])

    written = [write_jsonl(out / "couplings.jsonl", (r.couplings for r in ok))]
    tasks = set(config.tasks)
    if ok:
        if "growth" in tasks:
            written += _write_growth(out, config, grid, ok)
        if "spectrum" in tasks:
            written += _write_spectrum(out, config, grid, ok)
        if "rmt" in tasks:
            written += _write_rmt(out, config, grid, ok)
        if "ks_ee" in tasks:
            written += _write_ks_ee(out, config, ok)
        if "diagnostics" in tasks:
            written += _write_diagnostics(out, config, ok)
        if "profile" in tasks:
            written += _write_profile(out, ok)

    status = "complete" if not failed else ("partial" if ok else "failed")
    manifest = RunManifest(
        config=config.to_dict(),
        master_seed=config.master_seed,
        samples=[SampleSeed(sample_index=r.sample_index, seed=r.seed) for r in results],
        failed_samples=failed,
        status=status,
        code_version=code_version(),
        n_workers=config.worker_count(),
        wall_time_seconds=time.perf_counter() - started,
        outputs=inventory(out, written),
    )
    write_json(out / "manifest.json", manifest)
    logger.info("Run %s in %.1fs, outputs in %s", status, manifest["wall_time_seconds"], out)
    return manifest


# =============================================================================
# CLI
# =============================================================================


def _read_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = dict(parse_override(item) for item in args.set or [])
    for flag, key in (("output_dir", "output_dir"), ("n_workers", "n_workers"), ("master_seed", "master_seed"), ("n_samples", "n_samples")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    path = Path(args.config)
    if path.suffix == ".json":
        try:
            recorded = load_manifest(path)["config"]
        except (OSError, KeyError, ValueError) as exc:
            msg = f"Cannot read a config from manifest {path}: {exc}"
            raise ConfigParseError(msg) from exc
        return ExperimentConfig.from_mapping({**recorded, **overrides})
    return load_config(path, overrides)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _read_config(args)
    print(f"📊 Running {config.model} N={config.size} with {config.n_samples} samples...")
    manifest = run_experiment(config)
    if manifest["status"] == "complete":
        print(f"✅ Run complete in {manifest['wall_time_seconds']:.1f}s: {config.resolved_output_dir()}")
        return EXIT_OK
    print(f"⚠️ Run {manifest['status']}: {len(manifest['failed_samples'])} sample(s) failed, see manifest.json")
    return EXIT_FAILURE


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _read_config(args)
    violations = validate_config(config)
    if violations:
        print(f"❌ {len(violations)} violation(s):")
        for violation in violations:
            print(f"   - {violation}")
        return EXIT_FAILURE
    print(f"✅ Config is valid ({config.model} N={config.size}, tasks: {', '.join(config.tasks)})")
    return EXIT_OK


def _cmd_reference(args: argparse.Namespace) -> int:
    ensemble = reference_ensembles(args.kind, args.dim, args.count, args.seed)
    r = r_statistic(ensemble, args.gaps)
    print(f"📊 {args.kind.upper()} dim={args.dim} count={args.count}: <r> = {r.mean:.4f} ± {r.stderr:.4f} ({r.n_triples} triples)")
    if args.output_dir:
        out = Path(args.output_dir)
        gaps = unfold(ensemble.select(args.gaps), "fixed_i" if args.count > 1 else "none")
        histogram = spacing_histogram(gaps)
        write_csv(out / f"{args.kind}_ps_hist.csv", ["bin_center", "density"], zip(histogram.centers, histogram.density, strict=True))
        write_json(
            out / f"{args.kind}_reference.json",
            {
                "kind": args.kind,
                "dim": args.dim,
                "count": args.count,
                "seed": args.seed,
                "r_mean": r.mean,
                "r_stderr": r.stderr,
                "n_triples": r.n_triples,
                "ks_distance_gue": surmise_distance(gaps, "gue"),
                "ks_distance_poisson": surmise_distance(gaps, "poisson"),
            },
        )
        print(f"✅ Wrote reference statistics to {out}")
    return EXIT_OK


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="TOML config file (or a manifest.json to re-run)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", help="Override a config key (repeatable)")
    parser.add_argument("--output-dir", help="Output directory (relative paths resolve under $LYAPLAB_OUTPUT_ROOT)")
    parser.add_argument("--n-workers", type=int, help="Worker processes (0 = min(cores, samples))")
    parser.add_argument("--master-seed", type=int, help="Master seed for sample sub-seeds")
    parser.add_argument("--n-samples", type=int, help="Number of disorder samples")


def create_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Quantum Lyapunov spectrum laboratory for the SYK model and the disordered XXZ chain",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    run_parser = subparsers.add_parser("run", help="Run an experiment")
    _add_config_arguments(run_parser)

    validate_parser = subparsers.add_parser("validate", help="Validate a config without running it")
    _add_config_arguments(validate_parser)

    reference_parser = subparsers.add_parser("reference-ensembles", help="GUE/Poisson reference statistics")
    reference_parser.add_argument("kind", choices=REFERENCE_KINDS)
    reference_parser.add_argument("dim", type=int)
    reference_parser.add_argument("count", type=int)
    reference_parser.add_argument("seed", type=int)
    reference_parser.add_argument("--gaps", choices=GAP_SELECTIONS, default="all")
    reference_parser.add_argument("--output-dir", help="Write histogram and summary here")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = create_argument_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    handlers = {"run": _cmd_run, "validate": _cmd_validate, "reference-ensembles": _cmd_reference}
    try:
        return handlers[args.command](args)
    except ConfigValidationError as exc:
        print(f"❌ Invalid config ({len(exc.violations)} violation(s)):")
        for violation in exc.violations:
            print(f"   - {violation}")
        return EXIT_FAILURE
    except ConfigError as exc:
        print(f"❌ {exc}")
        return EXIT_USAGE
    except ValueError as exc:
        print(f"❌ {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
