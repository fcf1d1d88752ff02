"""Pure-Python/NumPy versions of the hot loops in ``_kernels.pyx``.

Both modules expose the same functions with the same array conventions:
``kinds[k]`` is 0 for a CNOT (``a`` control, ``b`` target) and 1 for a
rotation on qubit ``a`` with angle ``theta[k]``.
"""

from __future__ import annotations

import numpy as np


def trace_parities(init_masks, kinds, a, b):
    """Replay the parity table through the op list.

    Returns ``(observed, final)`` where ``observed[k]`` is the mask held by
    qubit ``a[k]`` when op ``k`` runs (meaningful for rotations) and ``final``
    is the mask table after the last op.
    """
    masks = [int(m) for m in init_masks]
    # masks wider than int64 (more than 62 variables) stay Python ints
    dtype = object if max((m.bit_length() for m in masks), default=0) > 62 else np.int64
    observed = np.empty(len(kinds), dtype=dtype)
    for k in range(len(kinds)):
        i = int(a[k])
        observed[k] = masks[i]
        if kinds[k] == 0:
            masks[int(b[k])] ^= masks[i]
    return observed, np.asarray(masks, dtype=dtype)


def diagonal_phases(nbits, kinds, a, b, theta):
    """Phase picked up by every basis state |x>, x < 2**nbits, plus its final label.

    Qubit i is bit i of the label. A rotation contributes
    ``-theta * (+1 if bit is 0 else -1)``, i.e. exp(-i theta Z).
    """
    labels = np.arange(1 << nbits, dtype=np.int64)
    phase = np.zeros(1 << nbits, dtype=np.float64)
    for k in range(len(kinds)):
        i = int(a[k])
        if kinds[k] == 0:
            labels ^= ((labels >> i) & 1) << int(b[k])
        else:
            bit = (labels >> i) & 1
            phase -= float(theta[k]) * (1 - 2 * bit)
    return phase, labels
