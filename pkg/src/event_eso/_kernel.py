"""Compiled co-simulation loop for the built-in plant, noise and observer families.

Mirrors ``engine.simulate_path_reference`` step for step; keep the two in sync.
Integer codes are defined in ``engine``.
"""
import math

import numba
import numpy as np

OK = 0
OVERFLOW = 1


@numba.njit(cache=True, nogil=True)
def _bounded(fam, amp, tc, bc, t, b1):
    if fam == 0:
        return amp * math.sin(tc * t + bc * b1)
    if fam == 1:
        return amp * math.cos(tc * t + bc * b1)
    return amp * math.cos(tc * t)


@numba.njit(cache=True, nogil=True)
def _disturbance(kind, b, c, x, v1, v2):
    if kind == 0:
        return -b[0] * x[0] - b[1] * x[1] + b[2] * math.sin(b[3] * x[0] + b[4] * x[1]) + v1 + b[8] * v2
    if kind == 1:
        return c
    return 0.0


@numba.njit(cache=True, nogil=True)
def _spow(x, s):
    if x == 0.0:
        return 0.0
    return math.copysign(math.exp(s * math.log(abs(x))), x)


@numba.njit(cache=True, nogil=True)
def run_chunk(
    z, j_start, j_stop, j_last, h, stride, j_tail,
    x, xh, nst, etm,
    dist_kind, bvec, cval, input_kind, b10,
    fam, amp, tc, bc, decay, sd,
    obs_kind, gain, rn, expo, dwell, thr,
    rec_t, rec_x, rec_ext, rec_xh, counters,
    trig_t, trig_y, trig_dt,
    tail_sum, tail_sup, bound,
):
    """Process grid indices ``j_start <= j < j_stop``; index ``j_last`` is recorded but not stepped.

    ``nst`` = (b1, b2, v2); ``etm`` = (last trigger time, held output);
    ``counters`` = (records written, triggers in this chunk, tail samples,
    total triggers, bound flag, failing step).
    """
    n = x.size
    m = n + 1
    sq = math.sqrt(h)
    dx = np.empty(n)
    dxh = np.empty(m)
    err = np.empty(m)
    for j in range(j_start, j_stop):
        t = j * h
        y = x[0]
        if j > 0:
            elapsed = t - etm[0]
            if elapsed >= dwell and abs(y - etm[1]) >= thr:
                k = counters[1]
                trig_t[k] = t
                trig_y[k] = y
                trig_dt[k] = elapsed
                counters[1] = k + 1
                counters[3] += 1
                etm[0] = t
                etm[1] = y
        v1 = _bounded(fam, amp, tc, bc, t, nst[0])
        f = _disturbance(dist_kind, bvec, cval, x, v1, nst[2])
        if input_kind == 1:
            u = math.cos(b10 * t)
        else:
            u = 0.0
        if j % stride == 0 or j == j_last:
            ri = counters[0]
            rec_t[ri] = t
            for i in range(n):
                rec_x[ri, i] = x[i]
            rec_ext[ri] = f
            for i in range(m):
                rec_xh[ri, i] = xh[i]
            counters[0] = ri + 1
        if j >= j_tail:
            for i in range(n):
                err[i] = x[i] - xh[i]
            err[n] = f - xh[n]
            for i in range(m):
                a = abs(err[i])
                tail_sum[i] += a * a
                if a > tail_sup[i]:
                    tail_sup[i] = a
            counters[2] += 1
        if j == j_last:
            break
        e = etm[1] - xh[0]
        if not math.isfinite(e) or not math.isfinite(f):
            counters[5] = j
            return OVERFLOW
        for i in range(n - 1):
            dx[i] = x[i + 1]
        dx[n - 1] = f + u
        if obs_kind == 0:
            for i in range(m):
                dxh[i] = gain[i] * e
        else:
            s = rn * e
            for i in range(m):
                dxh[i] = gain[i] * _spow(s, expo[i])
        for i in range(n):
            dxh[i] += xh[i + 1]
        dxh[n - 1] += u
        norm2 = 0.0
        for i in range(n):
            x[i] += h * dx[i]
            norm2 += x[i] * x[i]
        for i in range(m):
            xh[i] += h * dxh[i]
        if norm2 > bound * bound:
            counters[4] = 1
        ii = j - j_start
        nst[0] += sq * z[ii, 0]
        nst[1] += sq * z[ii, 1]
        nst[2] = decay * nst[2] + sd * z[ii, 1]
    return OK
