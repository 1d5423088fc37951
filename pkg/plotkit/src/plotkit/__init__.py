"""Offline figure generation from solver run artifacts.

Consumes only the documented CSV/meta contracts of a run directory
(invariants.csv, snap_<t>.csv, run.meta, convergence.csv); never touches
solver internals and never recomputes physics: every plotted number
originates from a CSV cell.
"""

from .artifacts import ArtifactError, RunArtifacts, load_run, load_sweep
from .figures import plot_conservation, plot_convergence, plot_snapshots

__version__ = "0.1.0"

__all__ = [
    "ArtifactError",
    "RunArtifacts",
    "load_run",
    "load_sweep",
    "plot_conservation",
    "plot_convergence",
    "plot_snapshots",
    "__version__",
]
