"""Reference (numpy) implementations of the float kernels.

Used when the compiled extension is unavailable or HOROSTAR_PURE=1 is set.
Both backends must agree to rounding error; see tests/test_kernels.py.

A "term list" encodes a max of affine functions of one coordinate,
``f(w) = max_k (sign[k] * w[index[k]] + const[k])``. Horofunctions and the
functions psi_gap(z, ., x0) both have this shape.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 1 << 20


def _eval_terms(pts, index, sign, const):
    vals = pts[:, index] * sign + const
    return vals.max(axis=1)


def grid_sup_diff(index1, sign1, const1, index2, sign2, const2, lo, spacing, counts):
    """Max of |f1 - f2| over the lattice lo + spacing * k, 0 <= k < counts.

    Returns ``(value, argmax_point)``.
    """
    index1 = np.asarray(index1, dtype=np.intp)
    index2 = np.asarray(index2, dtype=np.intp)
    sign1 = np.asarray(sign1, dtype=float)
    sign2 = np.asarray(sign2, dtype=float)
    const1 = np.asarray(const1, dtype=float)
    const2 = np.asarray(const2, dtype=float)
    lo = np.asarray(lo, dtype=float)
    counts = tuple(int(c) for c in counts)
    total = int(np.prod(counts))
    best, best_flat = -1.0, 0
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idx = np.stack(np.unravel_index(flat, counts), axis=1)
        pts = lo + spacing * idx
        diff = np.abs(
            _eval_terms(pts, index1, sign1, const1) - _eval_terms(pts, index2, sign2, const2)
        )
        k = int(diff.argmax())
        if diff[k] > best:
            best, best_flat = float(diff[k]), int(flat[k])
    arg = lo + spacing * np.array(np.unravel_index(best_flat, counts), dtype=float)
    return best, arg


def _sup_abs(n, slope, icpt, out, tmp):
    """max_j |slope[j] * n + icpt[j]|, written into ``out``."""
    np.multiply(n, slope[0], out=out)
    out += icpt[0]
    np.abs(out, out=out)
    for j in range(1, len(slope)):
        np.multiply(n, slope[j], out=tmp)
        tmp += icpt[j]
        np.abs(tmp, out=tmp)
        np.maximum(out, tmp, out=out)
    return out


def affine_gap_series(ax, bx, ay, by, x0, n_start, n_stop):
    """f(n) = d(y_n, x_n) - d(y_n, x0) for n = n_start..n_stop (sup metric).

    x_n = ax * n + bx and y_n = ay * n + by. Works one coordinate at a time
    on 1-d buffers, which keeps temporaries small.
    """
    ax, bx, ay, by, x0 = (np.asarray(v, dtype=float) for v in (ax, bx, ay, by, x0))
    diff_slope, diff_icpt = ay - ax, by - bx
    base_icpt = by - x0
    out = np.empty(n_stop - n_start + 1)
    for start in range(n_start, n_stop + 1, _CHUNK):
        stop = min(start + _CHUNK, n_stop + 1)
        n = np.arange(start, stop, dtype=float)
        near = np.empty_like(n)
        tmp = np.empty_like(n)
        block = out[start - n_start : stop - n_start]
        _sup_abs(n, diff_slope, diff_icpt, block, tmp)
        block -= _sup_abs(n, ay, base_icpt, near, tmp)
    return out
