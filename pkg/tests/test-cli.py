#!/usr/bin/env python3.11
"""
Command-line integration tests.

Runs the scripts the way a user does, each into a scratch output root, and
checks exit codes, stdout and the written tables and records. Log output is
silenced with BILLIARDS_QUIET so that stdout and stderr stay small.
"""

import json
import os
import subprocess
import sys
import tempfile
import traceback
from pathlib import Path

# Add lib directory to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from lib import (
    ROOT, log, error, info,
    DEFAULT_RUN_CONFIG, merge_run_config, run_config_digest, validate_run_config_structure,
    read_csv_table, read_json_file,
    GrazingRay, NoConvergence, RunConfigError, TransferSingular, AdjacencyViolation,
)
from lib.cli import ITERATE_HEADER, exit_code_for

ENV = dict(os.environ, BILLIARDS_QUIET='1')


def run_script(script, *args):
    """Run scripts/<script> and return the completed process"""
    cmd = [sys.executable, str(ROOT / "scripts" / script), *args]
    return subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True, env=ENV)


def test_polynomial_output():
    result = run_script("topology.py", "betti", "2", "3")
    assert result.returncode == 0, result.stderr
    assert result.stdout.strip() == "1 + t + t^2 + t^3"
    result = run_script("topology.py", "equivariant-rank-sum", "3", "5")
    assert result.returncode == 0, result.stderr
    assert result.stdout.strip() == "4"


def test_simulate_diameter():
    with tempfile.TemporaryDirectory() as tmp:
        result = run_script("simulate.py", "--body", "circle 1", "--start", "1,0", "--direction=-1,0",
                            "-k", "4", "--check-period", "2", "--out", tmp)
        assert result.returncode == 0, result.stderr
        table = read_csv_table(Path(tmp) / "adhoc" / "tables" / "trace-k4.csv")
        assert table['header'][:3] == ['bounce', 'x0', 'x1']
        assert len(table['rows']) == 5
        assert float(table['metadata']['period_deviation']) <= 1e-10
        assert 'generated' in table['metadata'] and 'run_config_digest' in table['metadata']


def test_simulate_grazing_start():
    with tempfile.TemporaryDirectory() as tmp:
        result = run_script("simulate.py", "--body", "circle 1", "--start", "1,0", "--direction=0,1",
                            "--out", tmp)
        assert result.returncode == 4, result.returncode
        assert "GrazingRay" in result.stderr


def test_find_is_deterministic():
    with tempfile.TemporaryDirectory() as tmp:
        args = ("--body", "circle 1", "--n", "2", "--out", tmp)
        result = run_script("find-orbits.py", *args)
        assert result.returncode == 0, result.stderr
        record_path = Path(tmp) / "adhoc" / "orbits" / "orbit-n2-000.json"
        first = read_json_file(record_path)
        assert abs(first['length'] - 4.0) <= 1e-8
        assert not (Path(tmp) / "adhoc" / "orbits" / "orbit-n2-001.json").exists()

        result = run_script("find-orbits.py", *args)
        assert result.returncode == 0, result.stderr
        second = read_json_file(record_path)
        first.pop('generated')
        second.pop('generated')
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_iterate_ellipse_axes():
    with tempfile.TemporaryDirectory() as tmp:
        result = run_script("iterate.py", "--body", "ellipse 2 1", "--n", "2",
                            "--m-list", "1,2,4,8,16,32", "--out", tmp)
        assert result.returncode == 0, result.stderr
        reports = sorted((Path(tmp) / "adhoc" / "reports").glob("iterate-n2-*.json"))
        assert len(reports) == 2
        for path in reports:
            assert read_json_file(path)['passed']
        tables = sorted((Path(tmp) / "adhoc" / "tables").glob("iterate-n2-*.csv"))
        assert [p.name for p in tables] == ["iterate-n2-000.csv", "iterate-n2-001.csv"]
        for path in tables:
            table = read_csv_table(path)
            assert table['header'] == ITERATE_HEADER
            assert table['metadata']['n'] == "2"
            rows = table['rows']
            # twists 1, -1 and i from the default run configuration, one direct and one bott row each
            assert len(rows) == 6 * 6
            assert [int(r[0]) for r in rows[::6]] == [1, 2, 4, 8, 16, 32]
            for direct, bott in zip(rows[::2], rows[1::2]):
                assert (direct[6], bott[6]) == ("direct", "bott")
                assert direct[:6] == bott[:6], (direct, bott)
                assert abs(abs(complex(float(direct[1]), float(direct[2]))) - 1.0) <= 1e-12
            zs = {(round(float(r[1]), 12), round(float(r[2]), 12)) for r in rows}
            assert zs == {(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0)}, zs


def test_validate_run_configs():
    runs = [p.stem for p in sorted((ROOT / "config" / "runs").glob("*.yaml"))]
    assert runs
    result = run_script("validate-run.py", "--quiet", *runs)
    assert result.returncode == 0, result.stderr
    with tempfile.TemporaryDirectory() as tmp:
        bad = Path(tmp) / "bad.yaml"
        bad.write_text("name: bad\nbody:\n  name: circle\n  params: [1.0]\nn: 1\n")
        result = run_script("validate-run.py", str(bad))
        assert result.returncode == 4, result.returncode


def test_bangert_on_the_circle():
    with tempfile.TemporaryDirectory() as tmp:
        result = run_script("topology.py", "bangert", "--body", "circle 1", "--m", "5,10",
                            "--samples", "16", "--out", tmp)
        assert result.returncode == 0, result.stderr
        assert result.stdout.strip().splitlines()[-1] == "PASS"
        assert (Path(tmp) / "adhoc" / "tables" / "bangert.csv").exists()


def test_birkhoff_on_the_ellipse():
    with tempfile.TemporaryDirectory() as tmp:
        result = run_script("birkhoff.py", "--body", "ellipse 2 1", "--pair", "3,1", "--pair", "4,1",
                            "--pair", "5,1", "--pair", "5,2", "--phases", "6", "--out", tmp)
        assert result.returncode == 0, result.stderr
        report = read_json_file(Path(tmp) / "adhoc" / "reports" / "birkhoff.json")
        assert report['passed']
        assert [(p['n'], p['r']) for p in report['pairs']] == [(3, 1), (4, 1), (5, 1), (5, 2)]
        for pair in report['pairs']:
            assert pair['passed'] and pair['count'] >= 2, pair


def test_exit_codes():
    assert exit_code_for(GrazingRay("tangent", bounce_index=0)) == 4
    assert exit_code_for(RunConfigError("bad")) == 4
    assert exit_code_for(AdjacencyViolation("coincide", junction=1)) == 4
    assert exit_code_for(NoConvergence("stalled")) == 3
    assert exit_code_for(TransferSingular("singular")) == 3


def test_run_config_merge():
    merged = merge_run_config(DEFAULT_RUN_CONFIG, {'n': None, 'seeds': {'count': 3}, 'm_list': [1, 2]})
    assert merged['n'] == DEFAULT_RUN_CONFIG['n']
    assert merged['seeds']['count'] == 3 and merged['seeds']['strategy'] == 'mixed'
    assert merged['m_list'] == [1, 2]
    assert DEFAULT_RUN_CONFIG['seeds']['count'] == 8
    assert run_config_digest(merged) == run_config_digest(json.loads(json.dumps(merged)))
    assert run_config_digest(merged) != run_config_digest(merge_run_config(merged, {'n': 3}))
    assert not validate_run_config_structure(merged)['errors']
    broken = merge_run_config(merged, {'n': 1, 'mode': 'sideways'})
    assert len(validate_run_config_structure(broken)['errors']) == 2
    twisted = merge_run_config(merged, {'iterate': {'twists': [[2.0, 0.0], [1.0]]}})
    errors = validate_run_config_structure(twisted)['errors']
    assert len(errors) == 2, errors
    assert 'unit circle' in errors[0] and '[re, im]' in errors[1]


TESTS = [
    test_polynomial_output,
    test_simulate_diameter,
    test_simulate_grazing_start,
    test_find_is_deterministic,
    test_iterate_ellipse_axes,
    test_validate_run_configs,
    test_bangert_on_the_circle,
    test_birkhoff_on_the_ellipse,
    test_exit_codes,
    test_run_config_merge,
]


def main():
    log("=" * 60)
    log("Command-line Tests")
    log("=" * 60)
    failed = 0
    for test in TESTS:
        try:
            test()
            info(f"✓ {test.__name__}")
        except Exception as e:
            failed += 1
            error(f"✗ {test.__name__}: {type(e).__name__}: {e}")
            traceback.print_exc()
    if failed:
        error(f"{failed} of {len(TESTS)} test(s) failed")
        return 1
    log(f"🎉 All {len(TESTS)} command-line tests passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
