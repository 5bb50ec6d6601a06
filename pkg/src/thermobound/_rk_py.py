"""Pure-Python DOP853 stepper for eps'' + omega^2(t) eps = 0.

State is ``(Re eps, Im eps, Re eps', Im eps')``. This module and
``_rk_core.pyx`` implement the same algorithm with the same operation
order; keep them in sync.

For every accepted step the seven dense-output coefficient vectors are
returned alongside the grid, so a solution can be evaluated anywhere with
7th-order accuracy.
"""
import math

from ._dop853_tableau import A, B, C, D, E3, E5, INTERPOLATOR_POWER, N_STAGES, N_STAGES_EXTENDED

OK = 0
STEP_UNDERFLOW = 1
NEGATIVE_OMEGA2 = 2
MAX_STEPS = 3

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
ERR_EXP = -1.0 / 8.0


def profile_omega2(kind, params, bx, bc):
    """Scalar ``omega**2(t)`` closure matching the compiled core's evaluation."""
    w0, eta, Om, off = (float(p) for p in params)
    w02 = w0 * w0
    if kind == 0:
        return lambda t: w02
    if kind == 1:
        return lambda t: w02 * (off + eta * t)
    if kind == 2:
        return lambda t: w02 * (1.0 + eta * math.cos(Om * t))
    xs = [float(v) for v in bx]
    cs = [[float(v) for v in row] for row in bc]
    m = len(xs) - 1

    def pchip(t):
        lo, hi = 0, m
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if t < xs[mid]:
                hi = mid
            else:
                lo = mid
        dx = t - xs[lo]
        return ((cs[0][lo] * dx + cs[1][lo]) * dx + cs[2][lo]) * dx + cs[3][lo]

    return pchip


def _combine(y, h, coefs, K, n):
    """``y + h * sum_j coefs[j] K[j]`` over the first ``n`` stages."""
    out = []
    for i in range(4):
        acc = 0.0
        for j in range(n):
            c = coefs[j]
            if c != 0.0:
                acc += c * K[j][i]
        out.append(y[i] + h * acc)
    return out


def integrate(kind, params, bx, bc, y0, t_max, rtol, atol, h0, max_steps):
    """Integrate from 0 to ``t_max``.

    Returns ``(ts, ys, F, n_accepted, n_rejected, status, t_fail)``: grid
    times, 4-vectors at those times, and per-step dense coefficients
    ``F[step][power][component]``.
    """
    w2f = profile_omega2(kind, params, bx, bc)
    t = 0.0
    y = [float(c) for c in y0]
    ts = [t]
    ys = [tuple(y)]
    F = []
    h = min(h0, t_max)
    n_acc = 0
    n_rej = 0
    K = [[0.0] * 4 for _ in range(N_STAGES_EXTENDED)]

    w = w2f(t)
    if w < 0.0:
        return ts, ys, F, n_acc, n_rej, NEGATIVE_OMEGA2, t
    K[0] = [y[2], y[3], -w * y[0], -w * y[1]]

    while t < t_max:
        if n_acc + n_rej >= max_steps:
            return ts, ys, F, n_acc, n_rej, MAX_STEPS, t
        last = False
        if t + h >= t_max:
            h = t_max - t
            last = True
        if h < 1e-14 * max(1.0, abs(t)):
            return ts, ys, F, n_acc, n_rej, STEP_UNDERFLOW, t

        for s in range(1, N_STAGES):
            ys_ = _combine(y, h, A[s], K, s)
            ts_ = t + C[s] * h
            w = w2f(ts_)
            if w < 0.0:
                return ts, ys, F, n_acc, n_rej, NEGATIVE_OMEGA2, ts_
            K[s] = [ys_[2], ys_[3], -w * ys_[0], -w * ys_[1]]
        yn = _combine(y, h, B, K, N_STAGES)
        w = w2f(t + h)
        if w < 0.0:
            return ts, ys, F, n_acc, n_rej, NEGATIVE_OMEGA2, t + h
        K[N_STAGES] = [yn[2], yn[3], -w * yn[0], -w * yn[1]]

        e5sq = 0.0
        e3sq = 0.0
        for i in range(4):
            sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
            a5 = 0.0
            a3 = 0.0
            for j in range(N_STAGES + 1):
                a5 += E5[j] * K[j][i]
                a3 += E3[j] * K[j][i]
            a5 /= sc
            a3 /= sc
            e5sq += a5 * a5
            e3sq += a3 * a3
        if e5sq == 0.0 and e3sq == 0.0:
            err = 0.0
        else:
            err = abs(h) * e5sq / math.sqrt((e5sq + 0.01 * e3sq) * 4.0)

        if err <= 1.0:
            for s in range(N_STAGES + 1, N_STAGES_EXTENDED):
                ys_ = _combine(y, h, A[s], K, s)
                w = w2f(t + C[s] * h)
                K[s] = [ys_[2], ys_[3], -w * ys_[0], -w * ys_[1]]
            coeffs = []
            dy = [yn[i] - y[i] for i in range(4)]
            coeffs.append(dy)
            coeffs.append([h * K[0][i] - dy[i] for i in range(4)])
            coeffs.append([2.0 * dy[i] - h * (K[N_STAGES][i] + K[0][i]) for i in range(4)])
            for r in range(INTERPOLATOR_POWER - 3):
                row = D[r]
                vec = []
                for i in range(4):
                    acc = 0.0
                    for j in range(N_STAGES_EXTENDED):
                        acc += row[j] * K[j][i]
                    vec.append(h * acc)
                coeffs.append(vec)
            F.append(coeffs)

            t = t_max if last else t + h
            y = yn
            ts.append(t)
            ys.append(tuple(y))
            K[0] = K[N_STAGES]
            n_acc += 1
            fac = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, SAFETY * err ** ERR_EXP)
            h = h * fac
        else:
            n_rej += 1
            h = h * max(MIN_FACTOR, SAFETY * err ** ERR_EXP)

    return ts, ys, F, n_acc, n_rej, OK, t
