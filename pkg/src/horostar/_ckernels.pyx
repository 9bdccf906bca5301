# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernels; same contracts as horostar._kernels_py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline double _eval(const double[:] w, const Py_ssize_t[:] index,
                         const double[:] sign, const double[:] const_) noexcept nogil:
    cdef Py_ssize_t k
    cdef double best = sign[0] * w[index[0]] + const_[0]
    cdef double v
    for k in range(1, index.shape[0]):
        v = sign[k] * w[index[k]] + const_[k]
        if v > best:
            best = v
    return best


def grid_sup_diff(index1, sign1, const1, index2, sign2, const2, lo, double spacing, counts):
    cdef Py_ssize_t[:] i1 = np.ascontiguousarray(index1, dtype=np.intp)
    cdef Py_ssize_t[:] i2 = np.ascontiguousarray(index2, dtype=np.intp)
    cdef double[:] s1 = np.ascontiguousarray(sign1, dtype=np.float64)
    cdef double[:] s2 = np.ascontiguousarray(sign2, dtype=np.float64)
    cdef double[:] c1 = np.ascontiguousarray(const1, dtype=np.float64)
    cdef double[:] c2 = np.ascontiguousarray(const2, dtype=np.float64)
    cdef double[:] lo_ = np.ascontiguousarray(lo, dtype=np.float64)
    cdef Py_ssize_t[:] cnt = np.ascontiguousarray(counts, dtype=np.intp)
    cdef Py_ssize_t dim = lo_.shape[0]
    cdef Py_ssize_t[:] odo = np.zeros(dim, dtype=np.intp)
    cdef double[:] w = np.array(lo_, dtype=np.float64)
    cdef double[:] arg = np.array(lo_, dtype=np.float64)
    cdef double best = -1.0, diff
    cdef Py_ssize_t j
    with nogil:
        while True:
            diff = fabs(_eval(w, i1, s1, c1) - _eval(w, i2, s2, c2))
            if diff > best:
                best = diff
                for j in range(dim):
                    arg[j] = w[j]
            # odometer increment
            j = 0
            while j < dim:
                odo[j] += 1
                if odo[j] < cnt[j]:
                    w[j] = lo_[j] + spacing * odo[j]
                    break
                odo[j] = 0
                w[j] = lo_[j]
                j += 1
            if j == dim:
                break
    return best, np.asarray(arg)


def affine_gap_series(ax, bx, ay, by, x0, Py_ssize_t n_start, Py_ssize_t n_stop):
    cdef double[:] ax_ = np.ascontiguousarray(ax, dtype=np.float64)
    cdef double[:] bx_ = np.ascontiguousarray(bx, dtype=np.float64)
    cdef double[:] ay_ = np.ascontiguousarray(ay, dtype=np.float64)
    cdef double[:] by_ = np.ascontiguousarray(by, dtype=np.float64)
    cdef double[:] x0_ = np.ascontiguousarray(x0, dtype=np.float64)
    cdef Py_ssize_t dim = ax_.shape[0]
    out_arr = np.empty(n_stop - n_start + 1, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef Py_ssize_t n, j
    cdef double nf, y, d_yx, d_y0, v
    with nogil:
        for n in range(n_start, n_stop + 1):
            nf = <double>n
            d_yx = 0.0
            d_y0 = 0.0
            for j in range(dim):
                y = ay_[j] * nf + by_[j]
                v = fabs(y - (ax_[j] * nf + bx_[j]))
                if v > d_yx:
                    d_yx = v
                v = fabs(y - x0_[j])
                if v > d_y0:
                    d_y0 = v
            out[n - n_start] = d_yx - d_y0
    return out_arr
