"""Hot summation kernels with backend selection at import.

The compiled extension is preferred; the numpy fallback has identical
semantics.  Set SCATKIT_FORCE_NUMPY=1 to force the fallback (used by the
backend-agreement tests and the benchmark).
"""

import os

from . import _numpy

if os.environ.get("SCATKIT_FORCE_NUMPY") == "1":
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _fast as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _numpy
        BACKEND = "numpy"

packet_phase_sum_1d = _impl.packet_phase_sum_1d
packet_phase_sum_3d = _impl.packet_phase_sum_3d
plane_wave_sum = _impl.plane_wave_sum

numpy_backend = _numpy

__all__ = [
    "BACKEND",
    "packet_phase_sum_1d",
    "packet_phase_sum_3d",
    "plane_wave_sum",
    "numpy_backend",
]
