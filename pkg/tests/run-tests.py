#!/usr/bin/env python3.11
"""
Test runner for the billiard orbit toolkit.

Runs every tests/test-*.py script in its own interpreter (or only the ones
named on the command line) and prints a summary. Stops at the first failing
script unless --keep-going is given.
"""

import sys
import time
import argparse
import subprocess
from pathlib import Path

# Add lib directory to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from lib import ROOT, log, error, info

# Cheap unit tests first, the command-line integration test last
ORDER = ['geometry', 'configuration', 'spectral', 'topology', 'cli']


def discover(selected=None):
    """Test scripts in run order, optionally restricted to the given names"""
    found = {p.stem[len('test-'):]: p for p in (ROOT / "tests").glob("test-*.py")}
    names = sorted(found, key=lambda name: (ORDER.index(name) if name in ORDER else len(ORDER), name))
    if selected:
        missing = [name for name in selected if name not in found]
        if missing:
            error(f"Unknown test(s): {', '.join(missing)} (available: {', '.join(names)})")
            return None
        names = [name for name in names if name in selected]
    return [(name, found[name]) for name in names]


def run_test(name, test_path):
    """Run one test script; returns (passed, seconds)"""
    log(f"Running test-{name}...")
    started = time.monotonic()
    result = subprocess.run([sys.executable, str(test_path)], cwd=ROOT, capture_output=True, text=True)
    elapsed = time.monotonic() - started
    if result.returncode == 0:
        info(f"✅ test-{name} passed ({elapsed:.1f}s)")
        return True, elapsed
    error(f"❌ test-{name} failed with exit code {result.returncode} ({elapsed:.1f}s)")
    if result.stdout:
        print("STDOUT:", result.stdout)
    if result.stderr:
        print("STDERR:", result.stderr)
    return False, elapsed


def main():
    parser = argparse.ArgumentParser(description='Run the test suite')
    parser.add_argument('tests', nargs='*', help='Test names, e.g. geometry spectral (default: all)')
    parser.add_argument('--keep-going', '-k', action='store_true', help='Run the remaining tests after a failure')
    args = parser.parse_args()

    log("=" * 60)
    log("Billiard Orbit Toolkit - Test Suite")
    log("=" * 60)

    tests = discover(args.tests)
    if tests is None:
        return 1

    failed = []
    total = 0.0
    for name, path in tests:
        ok, elapsed = run_test(name, path)
        total += elapsed
        if not ok:
            failed.append(name)
            if not args.keep_going:
                break

    log("=" * 60)
    log(f"Test Results: {len(tests) - len(failed)} of {len(tests)} script(s) passed in {total:.1f}s")
    if failed:
        error(f"❌ Failed: {', '.join(failed)}")
        return 1
    log("🎉 All tests passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
