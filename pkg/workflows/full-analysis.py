#!/usr/bin/env python3.11
"""
Full Analysis Workflow

Find orbits → index table → iteration report for one run configuration.
Each step runs its script so that every stage leaves its own result files.
"""

import sys
import subprocess
import argparse
from pathlib import Path

# Import our common libraries
sys.path.insert(0, str(Path(__file__).parent.parent))
from lib import ROOT, log, warn, error, info, paths, validate_run_config_exists

STEPS = [
    ('find-orbits.py', 'Finding critical orbits'),
    ('indices.py', 'Computing the index table'),
    ('iterate.py', 'Checking the iterates'),
]

def full_analysis_workflow(run_name, extra_args=None, skip_find=False):
    """Execute find -> indices -> iterate; returns the exit code of the first failing step"""
    try:
        run_path = validate_run_config_exists(run_name)
    except FileNotFoundError:
        return 4

    log(f"Starting full analysis for run: {run_name}")
    steps = STEPS[1:] if skip_find else STEPS
    for number, (script, description) in enumerate(steps, start=1):
        log(f"Step {number}/{len(steps)}: {description}...")
        cmd = [sys.executable, str(ROOT / "scripts" / script), '--run', str(run_name)] + list(extra_args or [])
        try:
            subprocess.run(cmd, cwd=ROOT, check=True)
            log(f"✓ {description} done")
        except subprocess.CalledProcessError as e:
            error(f"{description} failed with exit code {e.returncode}")
            return e.returncode

    log("🎉 Full analysis completed successfully!")
    info(f"Results are in {paths.get_relative_path(paths.run_dir(run_path.stem))}")
    return 0

def main():
    parser = argparse.ArgumentParser(description='Find orbits, tabulate indices and check iterates for one run')
    parser.add_argument('run', help='Run configuration name or YAML path')
    parser.add_argument('--skip-find', action='store_true', help='Reuse the orbits stored by a previous search')
    parser.add_argument('--out', help='Output root directory (default: out/)')

    args = parser.parse_args()
    extra = ['--out', args.out] if args.out else []

    try:
        return full_analysis_workflow(args.run, extra, args.skip_find)
    except KeyboardInterrupt:
        warn("Workflow cancelled by user")
        return 1
    except Exception as e:
        error(f"Workflow failed: {e}")
        return 1

if __name__ == '__main__':
    sys.exit(main())
