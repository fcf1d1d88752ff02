# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: parity replay and diagonal phase simulation."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int8_t

cnp.import_array()


def trace_parities(init_masks, kinds, a, b):
    cdef int64_t[::1] masks = np.ascontiguousarray(init_masks, dtype=np.int64).copy()
    cdef int8_t[::1] kv = np.ascontiguousarray(kinds, dtype=np.int8)
    cdef int64_t[::1] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef int64_t[::1] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t m = kv.shape[0]
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef Py_ssize_t k
    cdef int64_t i
    for k in range(m):
        i = av[k]
        ov[k] = masks[i]
        if kv[k] == 0:
            masks[bv[k]] ^= masks[i]
    return out, np.asarray(masks)


def diagonal_phases(int nbits, kinds, a, b, theta):
    cdef int8_t[::1] kv = np.ascontiguousarray(kinds, dtype=np.int8)
    cdef int64_t[::1] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef int64_t[::1] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef double[::1] tv = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t size = (<Py_ssize_t>1) << nbits
    labels_arr = np.arange(size, dtype=np.int64)
    phase_arr = np.zeros(size, dtype=np.float64)
    cdef int64_t[::1] labels = labels_arr
    cdef double[::1] phase = phase_arr
    cdef Py_ssize_t m = kv.shape[0]
    cdef Py_ssize_t k, x
    cdef int64_t lab, ctrl, tgt
    cdef double th
    # state-major loop: each basis label walks the whole gate list once
    for x in range(size):
        lab = labels[x]
        th = 0.0
        for k in range(m):
            ctrl = av[k]
            if kv[k] == 0:
                lab ^= ((lab >> ctrl) & 1) << bv[k]
            elif (lab >> ctrl) & 1:
                th += tv[k]
            else:
                th -= tv[k]
        labels[x] = lab
        phase[x] = th
    return phase_arr, labels_arr
