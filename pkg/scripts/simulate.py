#!/usr/bin/env python3.11
"""
Simulate a Billiard Trajectory

Follows the billiard flow from a start point and direction for k bounces and
writes the bounce points as a CSV trace. With --check-period n it also
reports how far the trace is from being n-periodic.
"""

import sys
import argparse
from pathlib import Path

# Import our common libraries
sys.path.insert(0, str(Path(__file__).parent.parent))
from lib import log, warn, error, resolve_run_config, BilliardError
from lib.cli import add_common_arguments, overlay_from_args, cmd_simulate, exit_code_for, float_list

def main():
    parser = argparse.ArgumentParser(description='Trace a billiard trajectory for k bounces')
    add_common_arguments(parser)
    parser.add_argument('--start', type=float_list, help='Start point on the surface, e.g. 1,0')
    parser.add_argument('--direction', type=float_list, help='Start direction (normalized); default: towards --target')
    parser.add_argument('--target', type=float_list, help='Aim at this point (default: the interior point)')
    parser.add_argument('-k', '--bounces', type=int, help='Number of bounces')
    parser.add_argument('--check-period', type=int, help='Report the deviation from n-periodicity')

    args = parser.parse_args()

    try:
        overlay = overlay_from_args(args)
        overlay['simulate'] = {
            'start': args.start, 'direction': args.direction, 'target': args.target,
            'k': args.bounces, 'check_period': args.check_period,
        }
        data = resolve_run_config(args.run, overlay)
        return cmd_simulate(data)
    except KeyboardInterrupt:
        warn("Simulation cancelled by user")
        return 1
    except BilliardError as e:
        error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)
    except Exception as e:
        error(f"Simulation failed: {e}")
        return 1

if __name__ == '__main__':
    sys.exit(main())
