"""Kernel backend selection.

The hot kernels exist twice: a Cython extension (``_core``) and a pure
Python twin (``_pure``).  The compiled module is preferred when it
imports; ``KL_ANALYZER_BACKEND=python`` or ``=compiled`` forces a
choice.  Both produce identical floating point results, so the switch
never changes any analyzer output, only its speed.
"""

import os

from . import _pure

_choice = os.environ.get("KL_ANALYZER_BACKEND", "auto").lower()

_impl = None
if _choice in ("auto", "compiled"):
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None
        if _choice == "compiled":
            raise
if _impl is None or _choice == "python":
    _impl = _pure

BACKEND_NAME = "compiled" if _impl is not _pure else "python"

uniforms = _impl.uniforms
gaussians = _impl.gaussians
annulus_offsets = _impl.annulus_offsets
jacobi_eigen = _impl.jacobi_eigen
min_norm_point = _impl.min_norm_point
solve_linear = _impl.solve_linear


def available_backends():
    names = ["python"]
    try:
        from . import _core  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
