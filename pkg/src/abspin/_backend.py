"""Kernel backend selection.

The compiled extension is preferred; ``ABSPIN_PURE_PYTHON=1`` forces the
reference implementation. Callers look up ``kernels`` at call time, so it may
be swapped (tests do this to run both backends).
"""

import os

from abspin import _pykernels

kernels = _pykernels

if not os.environ.get("ABSPIN_PURE_PYTHON"):
    try:
        from abspin import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        kernels = _ckernels


def available():
    """Names of the importable backends, compiled first."""
    names = []
    try:
        from abspin import _ckernels  # noqa: F401
    except ImportError:
        pass
    else:
        names.append("cython")
    names.append("python")
    return names


def load(name):
    if name == "python":
        return _pykernels
    if name == "cython":
        from abspin import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
