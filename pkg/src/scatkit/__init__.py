"""scatkit: classical realizability of scattering diagrams and the numerics
of the singularities it generates.

The toolkit decides whether external momenta admit a classical space-time
picture of a diagram, builds the displacement geometry at realizable points,
classifies the local singularity degree, verifies packet fall-off laws by
oscillatory quadrature, exercises the reduced-transform analyticity
machinery, and cross-checks everything against classical Monte Carlo.
"""

from .diagram import (
    Diagram,
    ExternalLine,
    InternalLine,
    KConfiguration,
    ParticleSpec,
    conservation_residual,
    load_diagram,
    load_kconfig,
    loop_count,
    save_diagram,
    save_kconfig,
    validate_diagram,
)
from .fourvector import FourVector
from .landau import (
    FeasibilityResult,
    Realization,
    SolverOptions,
    classify_point,
    realize_spacetime,
    sample_surface,
    solve_landau,
)
from .packets import BumpProfile, MomentumWavePacket, rest_packet

__version__ = "0.1.0"

__all__ = [
    "BumpProfile",
    "Diagram",
    "ExternalLine",
    "FeasibilityResult",
    "FourVector",
    "InternalLine",
    "KConfiguration",
    "MomentumWavePacket",
    "ParticleSpec",
    "Realization",
    "SolverOptions",
    "classify_point",
    "conservation_residual",
    "load_diagram",
    "load_kconfig",
    "loop_count",
    "realize_spacetime",
    "rest_packet",
    "sample_surface",
    "save_diagram",
    "save_kconfig",
    "solve_landau",
    "validate_diagram",
    "__version__",
]
