"""Polynomial-order sweep (alpha = 0.85, N = 2..5) with boundary comparison.

Writes per-order run directories and convergence.csv under out/sweep. Use
--quick to shorten the horizon to 0.5 s.
"""

import sys
import tempfile
from pathlib import Path

from slabflow.cli import main

QUICK = "--quick" in sys.argv

CONFIG = f"""
alpha=0.85
t_order=1
dt=0.01
t_final={0.5 if QUICK else 7.0}
snapshots={"0.5" if QUICK else "0.01,2.34,4.67,7.0"}
out_dir=out/sweep
resolution=40
"""

if __name__ == "__main__":
    with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as fh:
        fh.write(CONFIG)
        cfg_path = fh.name
    code = main(["sweep", "--config", cfg_path, "--orders", "2,3,4,5"])
    Path(cfg_path).unlink()
    print("artifacts in out/sweep" if code == 0 else f"sweep failed with exit code {code}")
    sys.exit(code)
