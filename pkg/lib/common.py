#!/usr/bin/env python3.11
"""
Common utilities and helper functions for the billiard orbit scripts.

This module provides shared functionality to reduce code duplication across
the various Python scripts in the project.
"""

import os
import sys
import json
from datetime import datetime, timezone
from pathlib import Path

# Project root directory
ROOT = Path(__file__).resolve().parents[1]

# Color constants for terminal output
class Colors:
    GREEN = '\033[0;32m'
    YELLOW = '\033[1;33m'
    RED = '\033[0;31m'
    BLUE = '\033[0;34m'
    NC = '\033[0m'  # No Color

# Log lines go to stderr; stdout carries tables, JSON and polynomial strings
def _quiet(): return os.environ.get('BILLIARDS_QUIET', '') not in ('', '0')

def log(msg):
    if not _quiet(): print(f"{Colors.GREEN}[*]{Colors.NC} {msg}", file=sys.stderr)
def warn(msg): print(f"{Colors.YELLOW}[!]{Colors.NC} {msg}", file=sys.stderr)
def error(msg): print(f"{Colors.RED}[ERROR]{Colors.NC} {msg}", file=sys.stderr)
def info(msg):
    if not _quiet(): print(f"{Colors.BLUE}[INFO]{Colors.NC} {msg}", file=sys.stderr)

def utc_timestamp():
    """Current UTC time in ISO format, second resolution"""
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()

def ensure_directory(path: Path):
    """Ensure directory exists, create if necessary"""
    if not path.exists():
        log(f"Creating directory: {path}")
        path.mkdir(parents=True, exist_ok=True)
    return path

def read_json_file(file_path: Path):
    """Read and parse JSON file"""
    try:
        with open(file_path, 'r') as f:
            return json.load(f)
    except Exception as e:
        error(f"Failed to read JSON file {file_path}: {e}")
        return None

def write_json_file(file_path: Path, data):
    """Write data to JSON file (sorted keys, numpy-aware)"""
    from .data_conversion import NumericJSONEncoder
    try:
        ensure_directory(Path(file_path).parent)
        with open(file_path, 'w') as f:
            json.dump(data, f, indent=2, sort_keys=True, cls=NumericJSONEncoder)
            f.write('\n')
        return True
    except Exception as e:
        error(f"Failed to write JSON file {file_path}: {e}")
        return False

def find_files_by_pattern(directory: Path, pattern: str):
    """Find files matching a glob pattern in directory"""
    if not directory.exists():
        return []
    return sorted(directory.glob(pattern))

def get_project_paths():
    """Get commonly used project paths via PathManager"""
    from .paths import PathManager
    pm = PathManager(ROOT)
    return {
        'root': pm.root,
        'config': pm.config,
        'runs': pm.run_configs,
        'out': pm.out,
    }

def get_run_config_path(run_name: str):
    """Get the full path to a run configuration file"""
    paths = get_project_paths()

    # Accept explicit paths as they are
    candidate = Path(run_name)
    if candidate.suffix in ('.yaml', '.yml') and candidate.exists():
        return candidate.resolve()

    # Handle both with and without .yaml extension
    if not run_name.endswith('.yaml'):
        run_name += '.yaml'

    return paths['runs'] / run_name

def list_available_run_configs():
    """List all available run configuration files"""
    paths = get_project_paths()
    if not paths['runs'].exists():
        return []

    runs = list(paths['runs'].glob('*.yaml'))
    return [run.stem for run in sorted(runs)]

def list_newest_run_configs(limit=5):
    """List the newest run configuration files by modification time"""
    paths = get_project_paths()
    if not paths['runs'].exists():
        return []

    runs = list(paths['runs'].glob('*.yaml'))
    if not runs:
        return []

    # Sort by modification time (newest first)
    runs_with_mtime = [(run, run.stat().st_mtime) for run in runs]
    runs_with_mtime.sort(key=lambda x: x[1], reverse=True)

    return [run.stem for run, _ in runs_with_mtime[:limit]]

def validate_run_config_exists(run_name: str) -> Path:
    """Validate that a run configuration exists and return its path"""
    run_path = get_run_config_path(run_name)

    if not run_path.exists():
        newest = list_newest_run_configs(5)
        error(f"Run configuration not found: {run_path}")
        if newest:
            error(f"Recent run configurations (try one of these): {', '.join(newest)}")
        else:
            error("No run configurations found in config/runs/")
        raise FileNotFoundError(f"Run configuration not found: {run_name}")

    return run_path
