"""Independent reference computations used only by the tests.

None of these share code with the package: eigenvalues come from an
inertia count with bisection, exponentials from a Taylor series with
scaling and squaring, traces from explicit loops, and the ODE from a
fixed-step Runge-Kutta scheme.
"""
import math

import numpy as np


def count_below(H, x):
    """Number of eigenvalues of Hermitian ``H`` below ``x``.

    Sylvester inertia: the count equals the number of negative pivots of
    ``H - x I`` in Gaussian elimination without pivoting.
    """
    A = [[complex(v) for v in row] for row in np.asarray(H)]
    n = len(A)
    for i in range(n):
        A[i][i] -= x
    neg = 0
    for k in range(n):
        piv = A[k][k].real
        if piv == 0.0:
            piv = 1e-300
        if piv < 0:
            neg += 1
        for i in range(k + 1, n):
            f = A[i][k] / piv
            for j in range(k + 1, n):
                A[i][j] -= f * A[k][j]
    return neg


def eigenvalues_bisection(H, tol=1e-13):
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    r = float(np.max(np.sum(np.abs(H), axis=1))) + 1.0  # Gershgorin radius
    out = []
    for k in range(n):
        lo, hi = -r, r
        while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if count_below(H, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return np.array(out)


def expm_taylor(A, terms=50):
    """``exp(A)`` by scaling to norm < 1/2, a truncated Taylor series, then squaring."""
    A = np.asarray(A, dtype=complex)
    norm = float(np.max(np.sum(np.abs(A), axis=1)))
    s = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    B = A / (2 ** s)
    result = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ B / k
        result = result + term
    for _ in range(s):
        result = result @ result
    return result


def trace_product_loops(rho, A):
    rho = np.asarray(rho)
    A = np.asarray(A)
    n = rho.shape[0]
    total = 0j
    for i in range(n):
        for j in range(n):
            total += rho[i, j] * A[j, i]
    return total


def boltzmann_probs(levels, T):
    levels = [float(x) for x in levels]
    m = min(levels)
    w = [math.exp(-(e - m) / T) for e in levels]
    z = sum(w)
    return [x / z for x in w]


def shannon(p):
    return -sum(x * math.log(x) for x in p if x > 0)


def two_level_entropy(E0, T):
    """``S = beta E0 p1 + ln(1 + e^{-beta E0})`` for levels ``(0, E0)``."""
    b = 1.0 / T
    p1 = math.exp(-b * E0) / (1.0 + math.exp(-b * E0))
    return b * E0 * p1 + math.log(1.0 + math.exp(-b * E0))


def oscillator_entropy_series(omega, T, tol=1e-18):
    """``-sum p_n ln p_n`` with ``p_n = (1 - q) q^n``, ``q = e^{-omega/T}``, summed until negligible."""
    q = math.exp(-omega / T)
    s = 0.0
    n = 0
    while True:
        p = (1.0 - q) * q ** n
        if p < tol and n > 10:
            break
        if p > 0:
            s -= p * math.log(p)
        n += 1
    return s


def rk4_fixed(omega2, t_end, h, y0=(1 + 0j, 1j)):
    """Classical RK4 for ``eps'' = -omega2(t) eps`` on a uniform grid; returns (ts, eps, deps)."""
    n = int(math.ceil(t_end / h))
    h = t_end / n
    e, d = y0
    ts = [0.0]
    es = [e]
    ds = [d]
    t = 0.0
    for _ in range(n):
        k1e, k1d = d, -omega2(t) * e
        k2e, k2d = d + 0.5 * h * k1d, -omega2(t + 0.5 * h) * (e + 0.5 * h * k1e)
        k3e, k3d = d + 0.5 * h * k2d, -omega2(t + 0.5 * h) * (e + 0.5 * h * k2e)
        k4e, k4d = d + h * k3d, -omega2(t + h) * (e + h * k3e)
        e = e + h / 6.0 * (k1e + 2 * k2e + 2 * k3e + k4e)
        d = d + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
        t += h
        ts.append(t)
        es.append(e)
        ds.append(d)
    return np.array(ts), np.array(es), np.array(ds)


def airy_solution(t):
    """Exact ``eps`` for ``omega(t) = sqrt(t)`` via Airy functions of ``-t``."""
    from scipy.special import airy

    ai0, aip0, bi0, bip0 = airy(0.0)
    # eps = a Ai(-t) + b Bi(-t); eps' = -(a Ai'(-t) + b Bi'(-t))
    a, b = np.linalg.solve(np.array([[ai0, bi0], [-aip0, -bip0]], dtype=complex), [1.0, 1j])
    Ai, Aip, Bi, Bip = airy(-np.asarray(t, dtype=float))
    return a * Ai + b * Bi, -(a * Aip + b * Bip)


def rk4_richardson(omega2, t_end, h):
    """RK4 at steps ``h`` and ``h/2`` combined as ``(16 y_{h/2} - y_h) / 15`` on the coarse grid."""
    ts, e1, d1 = rk4_fixed(omega2, t_end, h)
    n = len(ts) - 1
    _, e2, d2 = rk4_fixed(omega2, t_end, t_end / (2 * n))
    return ts, (16 * e2[::2] - e1) / 15, (16 * d2[::2] - d1) / 15
