#!/usr/bin/env python3.11
"""
Index Table of Critical Orbits

Assembles the Hessian of every orbit of a run (stored orbits are reused,
otherwise a search runs first) and writes index triples, Poincaré points,
mean indices and the oracle checks. Exit code 3 on a property violation.
"""

import sys
import argparse
from pathlib import Path

# Import our common libraries
sys.path.insert(0, str(Path(__file__).parent.parent))
from lib import warn, error, resolve_run_config, BilliardError
from lib.cli import add_common_arguments, overlay_from_args, cmd_indices, exit_code_for

def main():
    parser = argparse.ArgumentParser(description='Morse indices, monodromy and mean indices of found orbits')
    add_common_arguments(parser)
    parser.add_argument('--z-samples', type=int, help='Unit-circle samples of the nullity cross-check')
    parser.add_argument('--scan-samples', type=int, help='Samples per arc of the semicontinuity scan')

    args = parser.parse_args()

    try:
        overlay = overlay_from_args(args)
        overlay['indices'] = {'z_samples': args.z_samples, 'scan_samples': args.scan_samples}
        data = resolve_run_config(args.run, overlay)
        return cmd_indices(data)
    except KeyboardInterrupt:
        warn("Index computation cancelled by user")
        return 1
    except BilliardError as e:
        error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)
    except Exception as e:
        error(f"Index computation failed: {e}")
        return 1

if __name__ == '__main__':
    sys.exit(main())
