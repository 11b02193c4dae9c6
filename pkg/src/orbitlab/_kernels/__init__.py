"""Univariate hot kernels: compiled extension with a pure-numpy fallback.

The compiled module is used when it imported cleanly; set
``ORBITLAB_BACKEND=python`` to force the fallback (useful for the
benchmark and for debugging).  ``BACKEND`` reports which one is active.
"""

import os

from . import _univar_py

if os.environ.get("ORBITLAB_BACKEND", "").lower() == "python":
    _impl = _univar_py
else:
    try:
        from . import _univar_cy as _impl
    except ImportError:
        _impl = _univar_py

BACKEND = _impl.BACKEND
horner_many = _impl.horner_many
horner_pair_many = _impl.horner_pair_many
iterate_pair_many = _impl.iterate_pair_many
compose_self = _impl.compose_self
polish_periodic = _impl.polish_periodic

__all__ = [
    "BACKEND",
    "horner_many",
    "horner_pair_many",
    "iterate_pair_many",
    "compose_self",
    "polish_periodic",
]
