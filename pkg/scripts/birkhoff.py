#!/usr/bin/env python3.11
"""
Birkhoff Sweep

For every coprime pair (n, r) of the run configuration, seeds (n, r) star
polygons on a plane table, solves in both modes and counts the distinct
orbits of rotation number r. Exit code 3 if some pair has fewer than two.
"""

import sys
import argparse
from pathlib import Path

# Import our common libraries
sys.path.insert(0, str(Path(__file__).parent.parent))
from lib import warn, error, resolve_run_config, BilliardError
from lib.cli import add_common_arguments, overlay_from_args, cmd_birkhoff, exit_code_for

def parse_pair(text):
    try:
        n, r = (int(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n,r, got '{text}'")
    return [n, r]

def main():
    parser = argparse.ArgumentParser(description='Periodic orbits of every rotation number on a plane table')
    add_common_arguments(parser)
    parser.add_argument('--pair', type=parse_pair, action='append', help='A coprime pair n,r (repeatable)')
    parser.add_argument('--phases', type=int, help='Seed phases per pair')

    args = parser.parse_args()

    try:
        overlay = overlay_from_args(args)
        overlay['birkhoff'] = {'pairs': args.pair, 'phases': args.phases}
        data = resolve_run_config(args.run, overlay)
        return cmd_birkhoff(data)
    except KeyboardInterrupt:
        warn("Sweep cancelled by user")
        return 1
    except BilliardError as e:
        error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)
    except Exception as e:
        error(f"Sweep failed: {e}")
        return 1

if __name__ == '__main__':
    sys.exit(main())
