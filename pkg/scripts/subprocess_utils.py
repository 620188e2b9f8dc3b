#!/usr/bin/env python3
"""
subprocess_utils.py - Git lookups for run provenance

The run manifest records the commit a result was produced from. Commands are
run through a resolved executable path, never through a shell.
"""

import shutil
import subprocess
from pathlib import Path
from typing import Any


class ExecutableNotFoundError(Exception):
    """Raised when a required executable is not found in PATH."""


class ProjectRootNotFoundError(Exception):
    """Raised when the project root directory cannot be located."""


def get_safe_executable(command: str) -> str:
    """
    Get the full path to an executable, validating it exists.

    Raises:
        ExecutableNotFoundError: If executable is not found in PATH
    """
    full_path = shutil.which(command)
    if full_path is None:
        msg = f"Required executable '{command}' not found in PATH"
        raise ExecutableNotFoundError(msg)
    return full_path


def _build_run_kwargs(function_name: str, **kwargs: Any) -> dict[str, Any]:
    """
    Hardened kwargs for subprocess.run: text mode, captured output, check=True.

    Raises:
        ValueError: If shell=True or an executable override is requested
    """
    if kwargs.get("shell"):
        msg = f"shell=True is not allowed in {function_name}"
        raise ValueError(msg)
    if "executable" in kwargs:
        msg = f"Overriding 'executable' is not allowed in {function_name}"
        raise ValueError(msg)
    kwargs.pop("text", None)
    run_kwargs = {"capture_output": True, "text": True, "check": True, **kwargs}
    run_kwargs.setdefault("encoding", "utf-8")
    return run_kwargs


def run_git_command(args: list[str], cwd: Path | None = None, **kwargs: Any) -> subprocess.CompletedProcess[str]:
    """
    Run `git <args>`.

    Raises:
        ExecutableNotFoundError: If git is not found
        subprocess.CalledProcessError: If the command fails and check=True
    """
    git_path = get_safe_executable("git")
    run_kwargs = _build_run_kwargs("run_git_command", **kwargs)
    return subprocess.run(  # noqa: S603,PLW1510  # validated executable path, no shell, check is in run_kwargs
        [git_path, *args],
        cwd=cwd,
        **run_kwargs,
    )


def get_git_commit_hash(cwd: Path | None = None) -> str | None:
    """Current commit hash, or None outside a git checkout or without git."""
    try:
        result = run_git_command(["rev-parse", "HEAD"], cwd=cwd, timeout=10)
    except (ExecutableNotFoundError, subprocess.CalledProcessError, subprocess.TimeoutExpired, OSError):
        return None
    return result.stdout.strip() or None


def find_project_root(start: Path | None = None) -> Path:
    """
    Walk up from `start` (default: this file) to the directory holding pyproject.toml.

    Raises:
        ProjectRootNotFoundError: If no parent directory has a pyproject.toml
    """
    project_root = (start or Path(__file__).resolve().parent).resolve()
    while project_root != project_root.parent:
        if (project_root / "pyproject.toml").exists():
            return project_root
        project_root = project_root.parent
    msg = "Could not locate pyproject.toml to determine project root"
    raise ProjectRootNotFoundError(msg)
