#!/usr/bin/env python3.11
"""
Topology Outputs

  topology.py betti N n                  Poincaré polynomial of Conf_n(S^N)
  topology.py equivariant N n            dihedral-equivariant polynomial (odd n)
  topology.py betti-rank-sum N n         sum of Betti numbers in degrees 0..N
  topology.py equivariant-rank-sum N n   the same for the equivariant polynomial
  topology.py bangert --m 10             lift check on the standard paths, CSV + PASS/FAIL
"""

import sys
import argparse
from pathlib import Path

# Import our common libraries
sys.path.insert(0, str(Path(__file__).parent.parent))
from lib import warn, error, resolve_run_config, BilliardError
from lib.cli import (
    TOPOLOGY_ACTIONS, add_common_arguments, overlay_from_args, cmd_topology, exit_code_for, int_list,
)

def main():
    parser = argparse.ArgumentParser(description='Poincaré polynomials and the iterated path lift',
                                     formatter_class=argparse.RawDescriptionHelpFormatter, epilog=__doc__)
    parser.add_argument('action', choices=TOPOLOGY_ACTIONS, help='What to compute')
    parser.add_argument('N', nargs='?', type=int, help='Sphere dimension')
    parser.add_argument('count', nargs='?', type=int, help='Number of points n')
    parser.add_argument('--coefficients', action='store_true', help='Print the coefficient list instead')
    add_common_arguments(parser)
    parser.add_argument('--m', type=int_list, help='Iteration orders of the lift, e.g. 5,10,20')
    parser.add_argument('--paths', help='Comma separated path names (default: all standard paths)')
    parser.add_argument('--samples', type=int, help='Samples per path')
    parser.add_argument('--epsilon', type=float, help='Also report membership in the epsilon-thickened space')

    args = parser.parse_args()

    try:
        overlay = overlay_from_args(args)
        overlay['topology'] = {
            'm_list': args.m,
            'paths': args.paths.split(',') if args.paths else None,
            'samples': args.samples,
            'epsilon': args.epsilon,
        }
        data = resolve_run_config(args.run, overlay) if args.action == 'bangert' else {}
        return cmd_topology(data, args.action, args.N, args.count, args.coefficients)
    except KeyboardInterrupt:
        warn("Cancelled by user")
        return 1
    except BilliardError as e:
        error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)
    except Exception as e:
        error(f"Topology command failed: {e}")
        return 1

if __name__ == '__main__':
    sys.exit(main())
