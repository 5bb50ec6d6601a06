# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled DOP853 stepper for eps'' + omega^2(t) eps = 0.

Mirrors ``_rk_py.integrate`` (same tableau, controller, dense-output
coefficients and status codes); omega^2 is evaluated in C.
"""
import numpy as np
from libc.math cimport cos, fabs, pow, fmax, fmin, sqrt

from . import _dop853_tableau as _tab

cdef int OK = 0
cdef int STEP_UNDERFLOW = 1
cdef int NEGATIVE_OMEGA2 = 2
cdef int MAX_STEPS = 3

cdef int NS = 12
cdef int NSX = 16
cdef int NPOW = 7
cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double ERR_EXP = -1.0 / 8.0

cdef double[::1] TC = np.ascontiguousarray(_tab.C, dtype=float)
cdef double[:, ::1] TA = np.ascontiguousarray(_tab.A, dtype=float)
cdef double[::1] TB = np.ascontiguousarray(_tab.B, dtype=float)
cdef double[::1] TE3 = np.ascontiguousarray(_tab.E3, dtype=float)
cdef double[::1] TE5 = np.ascontiguousarray(_tab.E5, dtype=float)
cdef double[:, ::1] TD = np.ascontiguousarray(_tab.D, dtype=float)


cdef struct Profile:
    int kind
    double w02
    double eta
    double Om
    double off
    const double* bx
    const double* bc
    int m


cdef inline double omega2(Profile* p, double t) noexcept nogil:
    cdef int lo, hi, mid
    cdef double dx
    if p.kind == 0:
        return p.w02
    if p.kind == 1:
        return p.w02 * (p.off + p.eta * t)
    if p.kind == 2:
        return p.w02 * (1.0 + p.eta * cos(p.Om * t))
    lo = 0
    hi = p.m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if t < p.bx[mid]:
            hi = mid
        else:
            lo = mid
    dx = t - p.bx[lo]
    # bc is row-major (4, m)
    return ((p.bc[lo] * dx + p.bc[p.m + lo]) * dx + p.bc[2 * p.m + lo]) * dx + p.bc[3 * p.m + lo]


cdef inline void combine(double* y, double h, const double* coefs, double[:, ::1] K, int n,
                         double* out) noexcept nogil:
    cdef int i, j
    cdef double acc, c
    for i in range(4):
        acc = 0.0
        for j in range(n):
            c = coefs[j]
            if c != 0.0:
                acc += c * K[j, i]
        out[i] = y[i] + h * acc


cdef inline void deriv(double* y, double w, double[:, ::1] K, int s) noexcept nogil:
    K[s, 0] = y[2]
    K[s, 1] = y[3]
    K[s, 2] = -w * y[0]
    K[s, 3] = -w * y[1]


def integrate(int kind, double[::1] params, double[::1] bx, double[:, ::1] bc,
              y0, double t_max, double rtol, double atol, double h0, long max_steps):
    """Integrate from 0 to ``t_max``; same return layout as the Python stepper."""
    cdef Profile p
    p.kind = kind
    p.w02 = params[0] * params[0]
    p.eta = params[1]
    p.Om = params[2]
    p.off = params[3]
    p.bx = &bx[0]
    p.bc = &bc[0, 0]
    p.m = bx.shape[0] - 1

    cdef double y[4]
    cdef double yn[4]
    cdef double s_[4]
    cdef double dy[4]
    cdef double[:, ::1] K = np.zeros((NSX, 4))
    cdef int i, j, s, r, status = OK, last
    cdef long n_acc = 0, n_rej = 0
    cdef double t = 0.0, h, w, err, sc, a3, a5, e3sq, e5sq, fac, ts_, acc, t_fail = 0.0

    for i in range(4):
        y[i] = float(y0[i])

    cdef long cap = 1024, n = 1
    ts = np.empty(cap)
    ys = np.empty((cap, 4))
    Fs = np.empty((cap, NPOW, 4))
    cdef double[::1] tv = ts
    cdef double[:, ::1] yv = ys
    cdef double[:, :, ::1] fv = Fs
    tv[0] = 0.0
    for i in range(4):
        yv[0, i] = y[i]

    h = fmin(h0, t_max)
    w = omega2(&p, t)
    if w < 0.0:
        return ts[:1], ys[:1], Fs[:0], 0, 0, NEGATIVE_OMEGA2, t
    deriv(y, w, K, 0)

    while t < t_max:
        if n_acc + n_rej >= max_steps:
            status = MAX_STEPS
            t_fail = t
            break
        last = 0
        if t + h >= t_max:
            h = t_max - t
            last = 1
        if h < 1e-14 * fmax(1.0, fabs(t)):
            status = STEP_UNDERFLOW
            t_fail = t
            break

        with nogil:
            for s in range(1, NS):
                combine(y, h, &TA[s, 0], K, s, s_)
                ts_ = t + TC[s] * h
                w = omega2(&p, ts_)
                if w < 0.0:
                    status = NEGATIVE_OMEGA2
                    t_fail = ts_
                    break
                deriv(s_, w, K, s)
            if status == OK:
                combine(y, h, &TB[0], K, NS, yn)
                w = omega2(&p, t + h)
                if w < 0.0:
                    status = NEGATIVE_OMEGA2
                    t_fail = t + h
                deriv(yn, w, K, NS)

                e5sq = 0.0
                e3sq = 0.0
                for i in range(4):
                    sc = atol + rtol * fmax(fabs(y[i]), fabs(yn[i]))
                    a5 = 0.0
                    a3 = 0.0
                    for j in range(NS + 1):
                        a5 += TE5[j] * K[j, i]
                        a3 += TE3[j] * K[j, i]
                    a5 /= sc
                    a3 /= sc
                    e5sq += a5 * a5
                    e3sq += a3 * a3
                if e5sq == 0.0 and e3sq == 0.0:
                    err = 0.0
                else:
                    err = fabs(h) * e5sq / sqrt((e5sq + 0.01 * e3sq) * 4.0)
        if status != OK:
            break

        if err <= 1.0:
            if n == cap:
                cap *= 2
                ts = np.resize(ts, cap)
                ys = np.resize(ys, (cap, 4))
                Fs = np.resize(Fs, (cap, NPOW, 4))
                tv = ts
                yv = ys
                fv = Fs
            with nogil:
                for s in range(NS + 1, NSX):
                    combine(y, h, &TA[s, 0], K, s, s_)
                    w = omega2(&p, t + TC[s] * h)
                    deriv(s_, w, K, s)
                for i in range(4):
                    dy[i] = yn[i] - y[i]
                    fv[n - 1, 0, i] = dy[i]
                    fv[n - 1, 1, i] = h * K[0, i] - dy[i]
                    fv[n - 1, 2, i] = 2.0 * dy[i] - h * (K[NS, i] + K[0, i])
                for r in range(NPOW - 3):
                    for i in range(4):
                        acc = 0.0
                        for j in range(NSX):
                            acc += TD[r, j] * K[j, i]
                        fv[n - 1, 3 + r, i] = h * acc

                if last:
                    t = t_max
                else:
                    t = t + h
                for i in range(4):
                    y[i] = yn[i]
                    K[0, i] = K[NS, i]
                tv[n] = t
                for i in range(4):
                    yv[n, i] = y[i]
            n += 1
            n_acc += 1
            if err == 0.0:
                fac = MAX_FACTOR
            else:
                fac = fmin(MAX_FACTOR, SAFETY * pow(err, ERR_EXP))
            h = h * fac
        else:
            n_rej += 1
            h = h * fmax(MIN_FACTOR, SAFETY * pow(err, ERR_EXP))

    return ts[:n].copy(), ys[:n].copy(), Fs[:n - 1].copy(), n_acc, n_rej, status, t_fail
