"""Compression experiment (alpha = 1.15): full 7 s reference run.

Writes invariants, snapshots and metadata under out/compression. Use
--quick for a 1 s, N = 3 desk-scale variant.
"""

import sys
import tempfile
from pathlib import Path

from slabflow.cli import main

QUICK = "--quick" in sys.argv

CONFIG = f"""
alpha=1.15
order={3 if QUICK else 5}
t_order=1
dt=0.01
t_final={1.0 if QUICK else 7.0}
snapshots={"0.01,0.5,1.0" if QUICK else "0.01,1.40,4.67,7.0"}
out_dir=out/compression
resolution=40
"""

if __name__ == "__main__":
    with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as fh:
        fh.write(CONFIG)
        cfg_path = fh.name
    code = main(["solve", "--config", cfg_path])
    Path(cfg_path).unlink()
    print("artifacts in out/compression" if code == 0 else f"run failed with exit code {code}")
    sys.exit(code)
