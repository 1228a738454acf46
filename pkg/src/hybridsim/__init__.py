"""Truncated-Fock-space toolkit for hybrid single-photon/coherent-state entanglement.

Submodules map onto the pipeline stages:

* :mod:`hybridsim.fock` — states, operators, composition, reduction
* :mod:`hybridsim.states` — named states and their closed-form figures
* :mod:`hybridsim.teleamp` — ECS tele-amplification and its Bell-projection oracle
* :mod:`hybridsim.metrics` — fidelity, NPT, Wigner functions, conditioning
* :mod:`hybridsim.homodyne` — loss channel, quadrature densities, sampling
* :mod:`hybridsim.tomography` — binned POVMs and RrhoR max-likelihood
* :mod:`hybridsim.cli` — the ``hybridsim`` command
"""

from .fock import DensityOp, Ket, LinOp, ModeShape
from .states import HybridParams
from .teleamp import TeleampParams, TeleampResult
from .homodyne import HomodyneConfig, QuadGrid, QuadSample
from .tomography import TomoConfig, TomoResult

__version__ = "0.1.0"

__all__ = [
    "DensityOp", "Ket", "LinOp", "ModeShape",
    "HybridParams", "TeleampParams", "TeleampResult",
    "HomodyneConfig", "QuadGrid", "QuadSample",
    "TomoConfig", "TomoResult",
    "__version__",
]
