#!/usr/bin/env python3.11
"""
Path Management Library for the billiard orbit toolkit

Centralized path management for run configurations and result files. All
results are organized under the 'out' directory, one subdirectory per run.
"""

from pathlib import Path
from typing import Optional


class PathManager:
    """Centralized path management for runs and their outputs"""

    def __init__(self, root_dir: Optional[Path] = None, out_dir: Optional[Path] = None):
        """Initialize path manager with project root directory"""
        if root_dir is None:
            self.root = Path(__file__).resolve().parents[1]
        else:
            self.root = Path(root_dir).resolve()
        self._out = Path(out_dir).resolve() if out_dir else None

    @property
    def out(self) -> Path:
        """Base output directory - all results go here"""
        return self._out if self._out else self.root / "out"

    @property
    def config(self) -> Path:
        """Configuration directory"""
        return self.root / "config"

    @property
    def run_configs(self) -> Path:
        """Run configuration directory"""
        return self.config / "runs"

    # Per-run result directories (organized under out/)

    def run_dir(self, run_name: str) -> Path:
        """Result directory of one run"""
        return self.out / run_name

    def orbits_dir(self, run_name: str) -> Path:
        """Orbit JSON records of a run"""
        return self.run_dir(run_name) / "orbits"

    def tables_dir(self, run_name: str) -> Path:
        """CSV tables of a run (traces, index tables, lift checks)"""
        return self.run_dir(run_name) / "tables"

    def reports_dir(self, run_name: str) -> Path:
        """JSON reports of a run (iteration reports, Birkhoff sweeps)"""
        return self.run_dir(run_name) / "reports"

    def get_relative_path(self, path: Path) -> str:
        """Get path relative to project root for display purposes"""
        try:
            return str(Path(path).relative_to(self.root))
        except ValueError:
            return str(path)


# Global instance for easy access
paths = PathManager()


if __name__ == "__main__":
    # Demo/test the path manager
    pm = PathManager()
    print("Billiards Path Manager")
    print("=" * 40)
    print(f"Root: {pm.root}")
    print(f"Run configs: {pm.run_configs}")
    print(f"Output: {pm.out}")
    print(f"Example orbits dir: {pm.get_relative_path(pm.orbits_dir('circle-n2'))}")
