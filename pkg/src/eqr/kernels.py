"""Kernel backend chosen at import time.

The compiled ``_ckernels`` extension is preferred; the pure-Python
``_pykernels`` module is used when the extension is missing or when the
environment variable ``EQR_PURE_PYTHON`` is set to a non-empty value other
than ``0``.
"""

import os

from ._pykernels import (  # noqa: F401
    ANTIPODE_GUARD,
    MODE_EQR,
    MODE_PLQR,
    STATUS_BLOWUP,
    STATUS_CHART,
    STATUS_OK,
)

_force_python = os.environ.get("EQR_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"

lift_rkmk4 = _impl.lift_rkmk4
simulate = _impl.simulate
