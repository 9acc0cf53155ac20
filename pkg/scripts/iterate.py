#!/usr/bin/env python3.11
"""
Iteration Report

Compares the directly computed indices of the m-fold iterates with the
split sums over m-th roots of unity and checks the iteration inequalities.
Exit code 3 names every failing row.
"""

import sys
import argparse
from pathlib import Path

# Import our common libraries
sys.path.insert(0, str(Path(__file__).parent.parent))
from lib import warn, error, resolve_run_config, BilliardError
from lib.cli import add_common_arguments, overlay_from_args, cmd_iterate, exit_code_for

def main():
    parser = argparse.ArgumentParser(description='Index growth of iterated orbits')
    add_common_arguments(parser)
    parser.add_argument('--orbit', type=int, help='Only the orbit with this index')
    parser.add_argument('--prime', type=int, help='Use m = 1, p, p^2, ... instead of --m-list')
    parser.add_argument('--max-m', type=int, help='Largest m of the prime-power list')

    args = parser.parse_args()

    try:
        overlay = overlay_from_args(args)
        overlay['iterate'] = {'prime': args.prime, 'max_m': args.max_m, 'workers': args.workers}
        data = resolve_run_config(args.run, overlay)
        return cmd_iterate(data, orbit_index=args.orbit)
    except KeyboardInterrupt:
        warn("Iteration report cancelled by user")
        return 1
    except BilliardError as e:
        error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)
    except Exception as e:
        error(f"Iteration report failed: {e}")
        return 1

if __name__ == '__main__':
    sys.exit(main())
