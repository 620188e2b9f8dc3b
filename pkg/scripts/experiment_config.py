#!/usr/bin/env python3
"""
experiment_config.py - Experiment configuration for lyaplab runs

Loads a flat TOML file, applies command-line overrides, and validates the
result. Validation never raises: it returns the list of violations so the
CLI can report all of them at once.
"""

from __future__ import annotations

import logging
import math
import os
import tomllib
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np
from packaging.version import InvalidVersion, Version

from lyapunov import EIGENVALUE_FLOOR, StateSelection
from qops import DIRAC_CONVENTIONS
from rmtstats import DEFAULT_UNFOLD_DEGREE, GAP_SELECTIONS, UNFOLDING_METHODS

logger = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = "LYAPLAB_OUTPUT_ROOT"
SUPPORTED_FORMAT = Version("1.0")
MODELS = ("syk", "xxz")
TASKS = ("growth", "spectrum", "ks_ee", "diagnostics", "rmt", "profile")
# tasks that take logarithms of L and need t > 0
EXPONENT_TASKS = frozenset({"growth", "spectrum", "rmt", "profile", "ks_ee"})
SPACINGS = ("linear", "geometric")
SECTOR_MODES = ("masked", "full")
MAX_HILBERT_DIM = 1 << 13


class ConfigError(Exception):
    """Base exception for configuration problems."""


class ConfigParseError(ConfigError):
    """Raised when a config file or override cannot be read."""


class ConfigValidationError(ConfigError):
    """Raised when a config has one or more violations."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: model, couplings, time grid, ensemble, tasks and outputs."""

    format_version: str = "1.0"
    model: str = "syk"
    size: int = 8
    J: float = 1.0
    K: float = 0.01
    W: float = 0.5
    t_start: float = 0.02
    t_stop: float = 100.0
    t_count: int = 40
    spacing: str = "geometric"
    n_samples: int = 10
    master_seed: int = 0
    state_selection: str = "all"
    tasks: tuple[str, ...] = ("growth",)
    output_dir: str = "results"
    n_workers: int = 0
    total_sz: float = 0.0
    subsystem_modes: int | None = None
    ks_ee_window: tuple[float, float] = (1.0, 2.0)
    rmt_gaps: str = "all"
    rmt_unfolding: str = "fixed_i"
    unfold_degree: int = DEFAULT_UNFOLD_DEGREE
    histogram_bins: int = 40
    histogram_max: float = 4.0
    profile_time: float = 2.0
    eigenvalue_floor: float = EIGENVALUE_FLOOR
    sector_mode: str = "masked"
    dirac_convention: str = "standard"

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> ExperimentConfig:
        """
        Build a config from parsed TOML, coercing value types.

        Raises:
            ConfigValidationError: On unknown keys or values of the wrong type
        """
        known = {f.name: f for f in fields(cls)}
        violations = [f"unknown key {key!r}" for key in data if key not in known]
        values: dict[str, Any] = {}
        for key, raw in data.items():
            if key not in known:
                continue
            try:
                values[key] = _coerce(key, raw)
            except (TypeError, ValueError) as exc:
                violations.append(f"{key}: {exc}")
        if violations:
            raise ConfigValidationError(violations)
        return cls(**values)

    def with_overrides(self, overrides: dict[str, Any]) -> ExperimentConfig:
        merged = {**self.to_dict(), **overrides}
        return ExperimentConfig.from_mapping(merged)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["tasks"] = list(self.tasks)
        data["ks_ee_window"] = list(self.ks_ee_window)
        return data

    @property
    def n_ops(self) -> int:
        """Number of Lyapunov exponents: N for SYK, N_site for XXZ."""
        return self.size

    @property
    def hilbert_dim(self) -> int:
        return 1 << (self.size // 2 if self.model == "syk" else self.size)

    @property
    def effective_subsystem_modes(self) -> int:
        return self.subsystem_modes if self.subsystem_modes is not None else max(1, self.size // 4)

    def selection(self) -> StateSelection:
        return StateSelection.parse(self.state_selection)

    def time_grid(self) -> np.ndarray:
        if self.t_count == 1:
            return np.array([self.t_start])
        if self.spacing == "geometric":
            return np.geomspace(self.t_start, self.t_stop, self.t_count)
        return np.linspace(self.t_start, self.t_stop, self.t_count)

    def resolved_output_dir(self) -> Path:
        path = Path(self.output_dir)
        root = os.environ.get(OUTPUT_ROOT_ENV)
        if root and not path.is_absolute():
            return Path(root) / path
        return path

    def worker_count(self) -> int:
        if self.n_workers > 0:
            return min(self.n_workers, self.n_samples)
        return max(1, min(os.cpu_count() or 1, self.n_samples))


_INT_KEYS = {"size", "t_count", "n_samples", "master_seed", "n_workers", "unfold_degree", "histogram_bins"}
_FLOAT_KEYS = {"J", "K", "W", "t_start", "t_stop", "total_sz", "histogram_max", "profile_time", "eigenvalue_floor"}


def _coerce(key: str, raw: Any) -> Any:
    if key in _INT_KEYS:
        if isinstance(raw, bool) or not isinstance(raw, int):
            msg = f"expected an integer, got {raw!r}"
            raise TypeError(msg)
        return raw
    if key in _FLOAT_KEYS:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            msg = f"expected a number, got {raw!r}"
            raise TypeError(msg)
        return float(raw)
    if key == "subsystem_modes":
        if raw is None:
            return None
        return _coerce("size", raw)
    if key == "tasks":
        items = [raw] if isinstance(raw, str) else raw
        if not isinstance(items, (list, tuple)) or not all(isinstance(t, str) for t in items):
            msg = f"expected a list of task names, got {raw!r}"
            raise TypeError(msg)
        return tuple(t.strip() for t in items)
    if key == "ks_ee_window":
        if not isinstance(raw, (list, tuple)) or len(raw) != 2:
            msg = f"expected [lo, hi], got {raw!r}"
            raise TypeError(msg)
        return (float(raw[0]), float(raw[1]))
    if not isinstance(raw, str):
        msg = f"expected a string, got {raw!r}"
        raise TypeError(msg)
    return raw


def parse_override(text: str) -> tuple[str, Any]:
    """
    Parse a `key=value` override; the value is read as a TOML literal when
    possible and as a bare string otherwise.

    Raises:
        ConfigParseError: If there is no '=' or the key is empty
    """
    key, sep, value = text.partition("=")
    key = key.strip()
    if not sep or not key:
        msg = f"Override must look like key=value (got {text!r})"
        raise ConfigParseError(msg)
    try:
        return key, tomllib.loads(f"value = {value.strip()}")["value"]
    except tomllib.TOMLDecodeError:
        return key, value.strip()


def load_config(path: Path, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """
    Read a TOML config and apply overrides.

    Raises:
        ConfigParseError: If the file is missing or not valid TOML
        ConfigValidationError: On unknown keys or mistyped values
    """
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except FileNotFoundError as exc:
        msg = f"Config file not found: {path}"
        raise ConfigParseError(msg) from exc
    except tomllib.TOMLDecodeError as exc:
        msg = f"Invalid TOML in {path}: {exc}"
        raise ConfigParseError(msg) from exc
    merged = {**data, **(overrides or {})}
    logger.debug("Loaded config %s with %d override(s)", path, len(overrides or {}))
    return ExperimentConfig.from_mapping(merged)


def _check_format(config: ExperimentConfig) -> list[str]:
    try:
        version = Version(config.format_version)
    except InvalidVersion:
        return [f"format_version {config.format_version!r} is not a version string"]
    if version.major != SUPPORTED_FORMAT.major or version > SUPPORTED_FORMAT:
        return [f"format_version {version} is not supported (expected {SUPPORTED_FORMAT.major}.x <= {SUPPORTED_FORMAT})"]
    return []


def _check_model(config: ExperimentConfig) -> list[str]:
    violations: list[str] = []
    if config.model not in MODELS:
        return [f"model must be one of {MODELS} (got {config.model!r})"]
    if config.model == "syk":
        if config.size < 2 or config.size % 2:
            violations.append(f"SYK size N must be even and >= 2 (got {config.size})")
        if config.J < 0 or config.K < 0:
            violations.append("J and K must be non-negative")
    else:
        if config.size < 2:
            violations.append(f"XXZ size N_site must be >= 2 (got {config.size})")
        if config.W < 0:
            violations.append("W must be non-negative")
        doubled = 2.0 * config.total_sz
        if doubled != round(doubled) or abs(doubled) > config.size or (config.size - round(doubled)) % 2:
            violations.append(f"total_sz = {config.total_sz} is not reachable with {config.size} spins")
        if config.sector_mode not in SECTOR_MODES:
            violations.append(f"sector_mode must be one of {SECTOR_MODES}")
    if config.size >= 2 and config.hilbert_dim > MAX_HILBERT_DIM:
        violations.append(f"Hilbert dimension {config.hilbert_dim} exceeds the dense limit {MAX_HILBERT_DIM}")
    return violations


def _check_time_grid(config: ExperimentConfig) -> list[str]:
    violations: list[str] = []
    if config.t_count < 1:
        violations.append("t_count must be >= 1")
    if config.spacing not in SPACINGS:
        violations.append(f"spacing must be one of {SPACINGS}")
    if set(config.tasks) & EXPONENT_TASKS and config.t_start <= 0:
        violations.append("t_start must be > 0 when Lyapunov exponents are requested")
    if config.t_start < 0:
        violations.append("t_start must be >= 0")
    if config.spacing == "geometric" and config.t_start <= 0:
        violations.append("geometric spacing needs t_start > 0")
    if config.t_count > 1 and config.t_stop <= config.t_start:
        violations.append("t_stop must exceed t_start")
    return violations


def _check_tasks(config: ExperimentConfig) -> list[str]:
    violations: list[str] = []
    if not config.tasks:
        return ["tasks must not be empty"]
    unknown = [t for t in config.tasks if t not in TASKS]
    if unknown:
        violations.append(f"unknown task(s) {unknown}; expected a subset of {TASKS}")
    if "ks_ee" in config.tasks:
        if config.model != "syk":
            violations.append("ks_ee is only defined for the SYK model")
        elif not 1 <= config.effective_subsystem_modes <= config.size // 2 - 1:
            violations.append(f"subsystem_modes must lie in 1..{config.size // 2 - 1}")
        if config.state_selection.strip() != "all":
            violations.append("ks_ee compares against the eigenstate-averaged h_KS; state_selection must be 'all'")
        lo, hi = config.ks_ee_window
        if not 0 <= lo < hi:
            violations.append("ks_ee_window must satisfy 0 <= lo < hi")
    if "rmt" in config.tasks:
        if config.rmt_gaps not in GAP_SELECTIONS:
            violations.append(f"rmt_gaps must be one of {GAP_SELECTIONS}")
        if config.rmt_unfolding not in UNFOLDING_METHODS:
            violations.append(f"rmt_unfolding must be one of {UNFOLDING_METHODS}")
        if config.unfold_degree < 1:
            violations.append("unfold_degree must be >= 1")
        if config.histogram_bins < 1 or config.histogram_max <= 0:
            violations.append("histogram_bins must be >= 1 and histogram_max > 0")
        if config.rmt_gaps == "largest_three" and config.n_ops < 3:
            violations.append("largest_three needs at least three exponents")
    if "profile" in config.tasks and config.profile_time <= 0:
        violations.append("profile_time must be > 0")
    if "diagnostics" in config.tasks and config.model == "xxz" and config.total_sz + 1 > config.size / 2:
        violations.append(f"diagnostics needs the raised sector total_sz + 1 = {config.total_sz + 1} to exist")
    return violations


def validate_config(config: ExperimentConfig) -> list[str]:
    """Return every violation found in `config` (empty when valid)."""
    violations = _check_format(config) + _check_model(config) + _check_time_grid(config) + _check_tasks(config)
    if config.n_samples < 1:
        violations.append("n_samples must be >= 1")
    if config.n_workers < 0:
        violations.append("n_workers must be >= 0 (0 picks min(cores, samples))")
    if not 0 < config.eigenvalue_floor < 1 or not math.isfinite(config.eigenvalue_floor):
        violations.append("eigenvalue_floor must lie in (0, 1)")
    if config.dirac_convention not in DIRAC_CONVENTIONS:
        violations.append(f"dirac_convention must be one of {DIRAC_CONVENTIONS}")
    try:
        config.selection()
    except ValueError as exc:
        violations.append(f"state_selection: {exc}")
    return violations


def require_valid(config: ExperimentConfig) -> ExperimentConfig:
    """
    Raises:
        ConfigValidationError: Listing every violation
    """
    violations = validate_config(config)
    if violations:
        raise ConfigValidationError(violations)
    return config

