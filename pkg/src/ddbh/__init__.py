"""Semiclassical laboratory for the driven-dissipative Bose-Hubbard lattice.

Modules map onto the physics layers: mean-field bistability
(ddbh.meanfield), the stochastic Gross-Pitaevskii integrator (ddbh.sgpe),
the reduced Ising/Model-A theory (ddbh.modela), domain-wall velocimetry
(ddbh.domainwall), the exact single-cavity oracle (ddbh.singlecavity), and
statistical estimation plus sweep orchestration (ddbh.stats, ddbh.sweep).
Hot stepping loops run through a compiled Cython core when available, with
a numpy fallback (ddbh.engine selects at import).
"""

__version__ = "0.1.0"

from .params import (CriticalPoint, IsingChart, ModelParams, critical_point,
                     from_ising_chart, to_ising_chart)

__all__ = [
    "__version__",
    "ModelParams", "CriticalPoint", "IsingChart",
    "critical_point", "to_ising_chart", "from_ising_chart",
]
