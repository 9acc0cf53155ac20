#!/usr/bin/env python3.11
"""
Validate a Run Configuration

Merges the run configuration over the defaults and checks its structure.
Returns exit code 0 if valid, 4 if it has errors.
"""

import sys
import argparse
from pathlib import Path

# Import our common libraries
sys.path.insert(0, str(Path(__file__).parent.parent))
from lib import (
    log, warn, error, info, DEFAULT_RUN_CONFIG, load_run_config, merge_run_config,
    validate_run_config_structure, get_run_config_summary, run_config_digest, RunConfigError,
)

def validate_run(run_name, quiet=False):
    """Validate one run configuration; True when it has no errors"""
    data = merge_run_config(DEFAULT_RUN_CONFIG, load_run_config(run_name))
    issues = validate_run_config_structure(data)

    for message in issues['info']:
        if not quiet:
            info(message)
    for message in issues['warnings']:
        warn(message)
    for message in issues['errors']:
        error(message)

    if issues['errors']:
        error(f"✗ {run_name}: {len(issues['errors'])} error(s)")
        return False

    if not quiet:
        for key, value in get_run_config_summary(data).items():
            info(f"  {key}: {value}")
        info(f"  digest: {run_config_digest(data)}")
    log(f"✓ {run_name} is valid")
    return True

def main():
    parser = argparse.ArgumentParser(description='Validate run configurations')
    parser.add_argument('runs', nargs='+', help='Run configuration names or YAML paths')
    parser.add_argument('--quiet', '-q', action='store_true', help='Only show problems')

    args = parser.parse_args()

    try:
        results = [validate_run(run, args.quiet) for run in args.runs]
        return 0 if all(results) else 4
    except RunConfigError as e:
        error(str(e))
        return 4
    except KeyboardInterrupt:
        warn("Validation cancelled by user")
        return 1
    except Exception as e:
        error(f"Validation failed: {e}")
        return 1

if __name__ == '__main__':
    sys.exit(main())
