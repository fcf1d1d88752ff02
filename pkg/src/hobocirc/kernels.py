"""Kernel selection: the compiled extension when importable, NumPy otherwise.

Set ``HOBOCIRC_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels
from .circuit import CNOT, Circuit

BACKEND = "python"
_impl = _pykernels
if os.environ.get("HOBOCIRC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def encode_ops(c: Circuit):
    """Flatten a circuit into kernel arrays plus the (layer, gate) of every op."""
    kinds, a, b, theta, where = [], [], [], [], []
    for k, g in c.gates():
        if isinstance(g, CNOT):
            kinds.append(0)
            a.append(g.control)
            b.append(g.target)
            theta.append(0.0)
        else:
            kinds.append(1)
            a.append(g.qubit)
            b.append(-1)
            theta.append(g.alpha)
        where.append((k, g))
    return (
        np.asarray(kinds, dtype=np.int8),
        np.asarray(a, dtype=np.int64),
        np.asarray(b, dtype=np.int64),
        np.asarray(theta, dtype=np.float64),
        where,
    )


def trace_parities(init_masks, kinds, a, b, impl=None):
    impl = impl or _impl
    if max((int(m).bit_length() for m in init_masks), default=0) > 62:
        impl = _pykernels
    return impl.trace_parities(init_masks, kinds, a, b)


def diagonal_phases(nbits, kinds, a, b, theta, impl=None):
    return (impl or _impl).diagonal_phases(nbits, kinds, a, b, theta)
