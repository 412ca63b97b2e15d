"""Computational laboratory for random walks in Dirichlet environment.

Modules:
    sampling   - exact Gamma/Dirichlet/urn samplers, moments, KS and Hill
    graph_env  - weighted digraphs, environments, reversal, linear solves
    walk       - walk engines on graphs and on lazy lattice environments
    flows      - electrical networks, Thomson flows, max-flow / min-cut
    onedim     - exact one-dimensional laws and the LDP rate function
    cli        - seeded experiment runner (also the `rwde` console script)
    kernels    - compiled/Python backend selection for the hot walk loops
"""

from .rng import RngHandle

__version__ = "0.1.0"

__all__ = ["RngHandle", "__version__"]
