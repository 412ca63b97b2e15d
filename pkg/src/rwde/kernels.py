"""Walk-kernel backend selection: compiled extension if available, else Python.

``BACKEND`` reports which implementation is active.  ``get_backend`` gives
explicit access to either implementation for the parity tests and the
benchmark in ``benchmarks/bench_kernels.py``.
"""
from __future__ import annotations

from . import _kernels_fallback

try:
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - exercised only on broken builds
    _impl = _kernels_fallback
    BACKEND = "python"

site_probs = _impl.site_probs
gamma_variates = _impl.gamma_variates
walk1d_checkpoints = _impl.walk1d_checkpoints
walk1d_path = _impl.walk1d_path
lattice_checkpoints = _impl.lattice_checkpoints
lattice_escape_trials = _impl.lattice_escape_trials


def get_backend(name: str):
    if name == "compiled":
        from . import _kernels

        return _kernels
    if name == "python":
        return _kernels_fallback
    raise ValueError(f"unknown backend {name!r}")
