"""Thermal states of a harmonic oscillator with time-dependent frequency.

``H(t) = (p^2 + omega(t)^2 q^2) / 2``. The classical solution ``eps(t)``
(see :mod:`thermobound.ode`) builds ladder operators at each time, and in
the quadratic basis ``K-, K+, K0`` at time ``t``

    H(t') = alpha(t, t') K-(t) + conj(alpha) K+(t) + gamma(t, t') K0(t).

Two families of entropy bounds are provided. The *physical* family compares
``H(t)`` with ``H(t')`` directly and depends only on the two frequencies.
The *invariant* family uses the Hamiltonian built from the time-dependent
invariants and picks up the factor ``f(t, t')``.

Every temperature-dependent closed form here has an independent check:
the Gaussian-route partition function against ``1 / (2 sinh(omega / 2T))``,
and both cross means against a truncated Fock-space diagonalisation.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalDegeneracyError, TruncationError, ValidationError
from .ode import ClassicalSolution, solve_classical
from .profiles import FrequencyProfile
from .spectral import HermitianOperator, mean_value
from .thermal import BoundsResult, ThermalSpec, _check_temperature, gibbs_state

log = logging.getLogger(__name__)

__all__ = [
    "FrequencyProfile", "ClassicalSolution", "solve_classical",
    "SU11Coefficients", "GaussianCoefficients",
    "su11_coefficients", "coth", "occupation", "entropy_oscillator",
    "thermal_energy", "cross_mean_frequencies", "cross_mean_physical",
    "delta_s_bounds_frequencies", "delta_s_bounds_physical",
    "gaussian_coefficients", "partition_function_gaussian", "partition_function_closed",
    "k_operator_means", "recombine", "recombined_cross_mean",
    "f_factor", "cross_mean_invariant", "delta_s_bounds_invariant",
    "fock_oracle_frequencies", "fock_truncated_oracle",
]

DEGENERACY_FLOOR = 1e-12
SU11_TOL = 1e-8
FOCK_TAIL_TOL = 1e-6
FOCK_MIN_N = 50


def coth(x: float) -> float:
    if x == 0.0:
        raise ValidationError("coth is singular at 0")
    return 1.0 / math.tanh(x)


def _check_frequency(w, name="omega") -> float:
    w = float(w)
    if not math.isfinite(w) or w <= 0.0:
        raise ValidationError(f"{name} must be positive and finite, got {w}")
    return w


def _freq(profile: FrequencyProfile, t) -> float:
    return _check_frequency(profile.omega(float(t)), f"omega({t})")


# SU(1,1) algebra ------------------------------------------------------------


@dataclass(frozen=True)
class SU11Coefficients:
    """``alpha`` (complex) and ``gamma`` (real) for ``H(t')`` in the ``K(t)`` basis."""

    alpha: complex
    gamma: float

    def casimir_gap(self, omega_tp: float) -> float:
        """``gamma^2 - 4|alpha|^2 - 4 omega(t')^2``; zero for an exact solution."""
        return self.gamma ** 2 - 4.0 * abs(self.alpha) ** 2 - 4.0 * omega_tp ** 2


def su11_coefficients(sol: ClassicalSolution, profile: FrequencyProfile | None,
                      t: float, t_prime: float) -> SU11Coefficients:
    """``alpha = (conj(eps')^2 + w'^2 conj(eps)^2) / 2``, ``gamma = |eps'|^2 + w'^2 |eps|^2``.

    ``eps`` is evaluated at ``t`` and ``w' = omega(t')``. ``profile``
    defaults to the one the solution was computed with.
    """
    profile = sol.profile if profile is None else profile
    e, d = sol(float(t))
    sol(float(t_prime))  # range check
    w2 = float(profile.omega2(float(t_prime)))
    ec, dc = e.conjugate(), d.conjugate()
    alpha = 0.5 * (dc * dc + w2 * ec * ec)
    gamma = abs(d) ** 2 + w2 * abs(e) ** 2
    return SU11Coefficients(complex(alpha), float(gamma))


# single-oscillator thermodynamics -------------------------------------------


def occupation(omega: float, T: float) -> float:
    """Bose occupation ``1 / (e^{omega/T} - 1)``."""
    x = _check_frequency(omega) / _check_temperature(T)
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def entropy_oscillator(omega: float, T: float) -> float:
    """Thermal entropy ``n ln((1 + n)/n) + ln(1 + n)``.

    Written as ``n omega/T + log1p(n)`` so it stays accurate when ``n`` is
    tiny.
    """
    omega = _check_frequency(omega)
    T = _check_temperature(T)
    n = occupation(omega, T)
    return n * (omega / T) + math.log1p(n)


def thermal_energy(omega: float, T: float) -> float:
    """``(omega / 2) coth(omega / 2T)``."""
    omega = _check_frequency(omega)
    return 0.5 * omega * coth(omega / (2.0 * _check_temperature(T)))


def partition_function_closed(omega: float, T: float) -> float:
    """``1 / (2 sinh(omega / 2T))``."""
    x = _check_frequency(omega) / (2.0 * _check_temperature(T))
    if x > 700.0:
        return math.exp(-x)
    return 0.5 / math.sinh(x)


# physical Hamiltonian ---------------------------------------------------------


def cross_mean_frequencies(omega_t: float, omega_tp: float, T: float) -> float:
    """``Tr(rho(t') H(t))`` where ``rho(t')`` is thermal for ``H(t')`` at ``T``.

    Equals ``(omega_t^2 + omega_tp^2) / (4 omega_tp) coth(omega_tp / 2T)``.
    """
    w = _check_frequency(omega_t, "omega_t")
    wp = _check_frequency(omega_tp, "omega_tp")
    T = _check_temperature(T)
    return (w * w + wp * wp) / (4.0 * wp) * coth(wp / (2.0 * T))


def cross_mean_physical(profile: FrequencyProfile, t: float, t_prime: float, T: float) -> float:
    return cross_mean_frequencies(_freq(profile, t), _freq(profile, t_prime), T)


def delta_s_bounds_frequencies(omega_t: float, omega_tp: float, T1: float, T2: float) -> BoundsResult:
    """Bounds on ``S(omega_tp, T2) - S(omega_t, T1)``."""
    w = _check_frequency(omega_t, "omega_t")
    wp = _check_frequency(omega_tp, "omega_tp")
    T1, T2 = _check_temperature(T1), _check_temperature(T2)
    c1 = coth(w / (2.0 * T1))
    c2 = coth(wp / (2.0 * T2))
    s = w * w + wp * wp
    lower = (wp * c2 - s / (2.0 * w) * c1) / (2.0 * T2)
    upper = (s / (2.0 * wp) * c2 - w * c1) / (2.0 * T1)
    exact = entropy_oscillator(wp, T2) - entropy_oscillator(w, T1)
    return BoundsResult(lower, upper, exact)


def delta_s_bounds_physical(profile: FrequencyProfile, t: float, t_prime: float,
                            T1: float, T2: float) -> BoundsResult:
    """Entropy-difference bounds between ``H(t)`` at ``T1`` and ``H(t')`` at ``T2``."""
    return delta_s_bounds_frequencies(_freq(profile, t), _freq(profile, t_prime), T1, T2)


# Gaussian route --------------------------------------------------------------


@dataclass(frozen=True)
class GaussianCoefficients:
    """``A0`` and ``A+`` for the thermal state of ``H(t')`` in the ``K(t)`` basis.

    ``alpha``, ``gamma``, ``omega_tp`` and ``T`` are kept so that the
    closed forms can be used when the generating-function denominator is
    too close to zero.
    """

    A0: float
    Aplus: complex
    alpha: complex
    gamma: float
    omega_tp: float
    T: float

    def __post_init__(self):
        if not self.A0 > 0.0:
            raise NumericalDegeneracyError(f"A0 must be positive, got {self.A0}")

    @property
    def Aminus(self) -> complex:
        return self.Aplus.conjugate()

    @property
    def denominator(self) -> float:
        """``1 - 2 sqrt(A0) + A0 - |A+|^2``."""
        r = math.sqrt(self.A0)
        return (1.0 - r) ** 2 - abs(self.Aplus) ** 2


def _gaussian_from(c: SU11Coefficients, omega_tp: float, T: float) -> GaussianCoefficients:
    x = omega_tp / T
    q = math.exp(-x)
    sech = 2.0 * q / (1.0 + q * q)
    th = math.tanh(x)
    # numerator and denominator divided by cosh(x) to avoid overflow
    den = 2.0 * omega_tp + c.gamma * th
    A0 = (2.0 * omega_tp * sech / den) ** 2
    Aplus = -2.0 * c.alpha.conjugate() * th / den
    return GaussianCoefficients(A0, complex(Aplus), c.alpha, c.gamma, omega_tp, T)


def gaussian_coefficients(sol: ClassicalSolution, profile: FrequencyProfile | None,
                          t: float, t_prime: float, T: float) -> GaussianCoefficients:
    """``A0 = 4w'^2 / D^2`` and ``A+ = -2 conj(alpha) sinh(w'/T) / D``.

    Here ``D = 2 w' cosh(w'/T) + gamma sinh(w'/T)`` and ``w' = omega(t')``.
    """
    profile = sol.profile if profile is None else profile
    T = _check_temperature(T)
    c = su11_coefficients(sol, profile, t, t_prime)
    return _gaussian_from(c, _freq(profile, t_prime), T)


def _degenerate(coeffs: GaussianCoefficients, what: str) -> bool:
    d = coeffs.denominator
    if d <= 0.0:
        raise NumericalDegeneracyError(f"{what}: denominator {d:.3e} is not positive")
    if d < DEGENERACY_FLOOR:
        log.warning("%s: denominator %.3e below %.0e, using closed form", what, d, DEGENERACY_FLOOR)
        return True
    return False


def partition_function_gaussian(coeffs: GaussianCoefficients) -> float:
    """``A0^{1/4} / sqrt(1 - 2 sqrt(A0) + A0 - |A+|^2)``.

    Raises
    ------
    NumericalDegeneracyError
        The denominator is not positive.
    """
    if _degenerate(coeffs, "partition function"):
        return partition_function_closed(coeffs.omega_tp, coeffs.T)
    return coeffs.A0 ** 0.25 / math.sqrt(coeffs.denominator)


def k_operator_means(coeffs: GaussianCoefficients) -> tuple[float, complex, complex]:
    """Thermal means ``(<K0>, <K+>, <K->)`` from the Gaussian-route coefficients.

    ``<K0> = (1 - A0 + |A+|^2) / (4 d)``, ``<K+> = conj(A+) / (2 d)`` and
    ``<K-> = A+ / (2 d)`` with ``d`` the partition-function denominator.
    """
    if _degenerate(coeffs, "K means"):
        C = coth(coeffs.omega_tp / (2.0 * coeffs.T))
        w = coeffs.omega_tp
        km = -coeffs.alpha.conjugate() * C / (4.0 * w)
        return coeffs.gamma * C / (8.0 * w), km.conjugate(), km
    d = coeffs.denominator
    ap = coeffs.Aplus
    k0 = (1.0 - coeffs.A0 + abs(ap) ** 2) / (4.0 * d)
    return k0, ap.conjugate() / (2.0 * d), ap / (2.0 * d)


def recombine(c: SU11Coefficients, means: tuple[float, complex, complex]) -> float:
    """``alpha <K-> + conj(alpha) <K+> + gamma <K0>``."""
    k0, kp, km = means
    return float((c.alpha * km + c.alpha.conjugate() * kp).real + c.gamma * k0)


def recombined_cross_mean(sol: ClassicalSolution, profile: FrequencyProfile | None,
                          t: float, t_prime: float, T: float) -> float:
    """``Tr(rho(t') H(t))`` rebuilt from ``K`` means.

    The means are taken in the thermal state of ``H(t')`` and combined with
    the coefficients of ``H(t)`` itself, ``alpha(t, t)`` and ``gamma(t, t)``.
    """
    profile = sol.profile if profile is None else profile
    means = k_operator_means(gaussian_coefficients(sol, profile, t, t_prime, T))
    return recombine(su11_coefficients(sol, profile, t, t), means)


# invariant Hamiltonian -------------------------------------------------------


def f_factor(sol: ClassicalSolution, t: float, t_prime: float) -> float:
    """``|e|^2 |d'|^2 + |d|^2 |e'|^2 - 2 Re(e conj(d)) Re(e' conj(d'))``.

    Unprimed quantities at ``t``, primed at ``t'``. Evaluated as the equal
    sum of squares ``(|e d' - d e'|^2 + |e conj(d') - d conj(e')|^2) / 2``,
    which has no cancellation when ``|eps|`` grows and gives
    ``f(t, t) = |W|^2 / 2 = 2`` directly.
    """
    e, d = sol(float(t))
    ep, dp = sol(float(t_prime))
    a = e * dp - d * ep
    b = e * dp.conjugate() - d * ep.conjugate()
    return 0.5 * (abs(a) ** 2 + abs(b) ** 2)


def cross_mean_invariant(sol: ClassicalSolution, profile: FrequencyProfile | None,
                         t: float, t_prime: float, T: float) -> float:
    """``(omega(t) / 4) coth(omega(t') / 2T) f(t, t')`` for the invariant-built Hamiltonian."""
    profile = sol.profile if profile is None else profile
    w = _freq(profile, t)
    wp = _freq(profile, t_prime)
    T = _check_temperature(T)
    return 0.25 * w * coth(wp / (2.0 * T)) * f_factor(sol, t, t_prime)


def delta_s_bounds_invariant(sol: ClassicalSolution, profile: FrequencyProfile | None,
                             t: float, t_prime: float, T1: float, T2: float) -> BoundsResult:
    """Bounds on ``S(T2, t') - S(T1, t)`` for the invariant-built Hamiltonians."""
    profile = sol.profile if profile is None else profile
    w = _freq(profile, t)
    wp = _freq(profile, t_prime)
    T1, T2 = _check_temperature(T1), _check_temperature(T2)
    f = f_factor(sol, t, t_prime)
    c1 = coth(w / (2.0 * T1))
    c2 = coth(wp / (2.0 * T2))
    lower = wp / (2.0 * T2) * (c2 - 0.5 * c1 * f)
    upper = w / (2.0 * T1) * (0.5 * c2 * f - c1)
    exact = entropy_oscillator(wp, T2) - entropy_oscillator(w, T1)
    return BoundsResult(lower, upper, exact)


# truncated Fock-space oracle -------------------------------------------------


def _quadratures(N: int) -> tuple[np.ndarray, np.ndarray]:
    """``q^2`` and ``p^2`` on the first ``N`` Fock states (unit reference frequency).

    Built at size ``N + 2`` before squaring so the kept block is exact.
    """
    M = N + 2
    a = np.diag(np.sqrt(np.arange(1, M, dtype=float)), 1)
    q = (a + a.T) / math.sqrt(2.0)
    p = 1j * (a.T - a) / math.sqrt(2.0)
    q2 = (q @ q)[:N, :N]
    p2 = (p @ p).real[:N, :N]
    return q2, p2


def fock_oracle_frequencies(omega_t: float, omega_tp: float, T: float, N: int = 400) -> tuple[float, float]:
    """``(Z, Tr(rho(t') H(t)))`` by diagonalising truncated ``N x N`` Hamiltonians.

    Raises
    ------
    TruncationError
        The thermal state puts more than ``1e-6`` of its weight on the top
        10% of the kept Fock states.
    """
    w = _check_frequency(omega_t, "omega_t")
    wp = _check_frequency(omega_tp, "omega_tp")
    T = _check_temperature(T)
    N = int(N)
    if N < FOCK_MIN_N:
        raise ValidationError(f"Fock truncation needs N >= {FOCK_MIN_N}, got {N}")
    q2, p2 = _quadratures(N)
    H_t = HermitianOperator(0.5 * (p2 + w * w * q2))
    H_tp = HermitianOperator(0.5 * (p2 + wp * wp * q2))
    state = gibbs_state(ThermalSpec(H_tp, T))
    tail = float(np.sum(np.real(np.diag(state.rho))[N - max(1, N // 10):]))
    if tail > FOCK_TAIL_TOL:
        raise TruncationError(f"tail weight {tail:.2e} exceeds {FOCK_TAIL_TOL:.0e}; increase N above {N}")
    return state.Z, mean_value(state.rho, H_t)


def fock_truncated_oracle(profile: FrequencyProfile, t: float, t_prime: float, T: float,
                          N: int = 400) -> tuple[float, float]:
    return fock_oracle_frequencies(_freq(profile, t), _freq(profile, t_prime), T, N)
