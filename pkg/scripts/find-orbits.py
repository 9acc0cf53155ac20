#!/usr/bin/env python3.11
"""
Find Periodic Billiard Orbits

Seeds configurations of n bounce points, drives each to a critical point of
the length functional and writes one JSON record per distinct orbit.
Exit code 0 if at least one orbit was found, 2 otherwise.
"""

import sys
import argparse
from pathlib import Path

# Import our common libraries
sys.path.insert(0, str(Path(__file__).parent.parent))
from lib import log, warn, error, info, resolve_run_config, get_run_config_summary, BilliardError
from lib.cli import add_common_arguments, overlay_from_args, cmd_find, exit_code_for

def main():
    parser = argparse.ArgumentParser(description='Find periodic billiard orbits as critical points of length')
    add_common_arguments(parser)
    parser.add_argument('--primitive-only', action='store_true', default=None,
                        help='Drop orbits that are iterates of shorter ones')
    parser.add_argument('--max-iters', type=int, help='Iteration budget per seed')

    args = parser.parse_args()

    try:
        overlay = overlay_from_args(args)
        overlay['solver'].update({'primitive_only': args.primitive_only, 'max_iters': args.max_iters})
        data = resolve_run_config(args.run, overlay)
        summary = get_run_config_summary(data)
        log(f"Searching n={summary['n']} on {summary['body']} "
            f"({summary['seed_count']} seeds, mode {summary['mode']}, rng seed {summary['rng_seed']})")
        return cmd_find(data)
    except KeyboardInterrupt:
        warn("Search cancelled by user")
        return 1
    except BilliardError as e:
        error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)
    except Exception as e:
        error(f"Search failed: {e}")
        return 1

if __name__ == '__main__':
    sys.exit(main())
