"""Closed forms for two-level systems in Bloch parametrisation.

``H = (h0 * I + h . sigma) / 2``; its eigenvalues are ``(h0 +- |h|) / 2``
and the thermal entropy depends only on ``|h| / T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .spectral import HermitianOperator
from .thermal import BoundsResult, _check_temperature


@dataclass(frozen=True)
class BlochHamiltonian:
    h0: float
    h: tuple[float, float, float]

    def __post_init__(self):
        h = tuple(float(x) for x in np.asarray(self.h, dtype=float).ravel())
        if len(h) != 3:
            raise ValidationError(f"Bloch vector needs 3 components, got {len(h)}")
        if not all(math.isfinite(x) for x in h + (float(self.h0),)):
            raise ValidationError("Bloch parameters must be finite")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "h0", float(self.h0))

    @property
    def norm(self) -> float:
        return math.sqrt(sum(x * x for x in self.h))

    @classmethod
    def from_polar(cls, h0: float, norm: float, theta: float, phi: float = 0.0) -> BlochHamiltonian:
        """Bloch vector of length ``norm`` at polar angle ``theta`` from the z axis."""
        return cls(h0, (norm * math.sin(theta) * math.cos(phi),
                        norm * math.sin(theta) * math.sin(phi),
                        norm * math.cos(theta)))


def to_matrix(b: BlochHamiltonian) -> HermitianOperator:
    h1, h2, h3 = b.h
    return HermitianOperator(0.5 * np.array([[b.h0 + h3, h1 - 1j * h2],
                                             [h1 + 1j * h2, b.h0 - h3]]))


def cos_angle(b1: BlochHamiltonian, b2: BlochHamiltonian) -> float:
    """Cosine of the angle between Bloch vectors, clamped to [-1, 1]; 0 if either vanishes."""
    n1, n2 = b1.norm, b2.norm
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    c = sum(x * y for x, y in zip(b1.h, b2.h)) / (n1 * n2)
    return max(-1.0, min(1.0, c))


def entropy_closed(norm_h: float, T: float) -> float:
    """Thermal entropy of a qubit with Bloch norm ``norm_h``.

    Evaluated as ``log1p(e^{-2x}) + 2x e^{-2x} / (1 + e^{-2x})`` with
    ``x = |h| / 2T``, which equals ``ln 2 + ln cosh x - x tanh x`` without
    overflow at large ``x``.
    """
    T = _check_temperature(T)
    if norm_h < 0 or not math.isfinite(norm_h):
        raise ValidationError(f"Bloch norm must be finite and nonnegative, got {norm_h}")
    x = norm_h / (2.0 * T)
    q = math.exp(-2.0 * x)
    return math.log1p(q) + 2.0 * x * q / (1.0 + q)


def mean_energy_closed(b: BlochHamiltonian, T: float) -> float:
    T = _check_temperature(T)
    n = b.norm
    return 0.5 * (b.h0 - n * math.tanh(n / (2.0 * T)))


def cross_mean_closed(b1: BlochHamiltonian, b2: BlochHamiltonian, T1: float) -> float:
    """``Tr(rho1 H2)`` for ``rho1`` thermal in ``b1`` at ``T1``.

    With ``|h1| = 0`` the state is ``I/2`` and the result is ``h0(2) / 2``.
    """
    T1 = _check_temperature(T1)
    n1 = b1.norm
    if n1 == 0.0:
        return 0.5 * b2.h0
    dot = sum(x * y for x, y in zip(b1.h, b2.h))
    return 0.5 * (b2.h0 - dot / n1 * math.tanh(n1 / (2.0 * T1)))


def delta_s_bounds_qubit(b1: BlochHamiltonian, b2: BlochHamiltonian, T1: float, T2: float) -> BoundsResult:
    """Entropy-difference bounds in terms of the Bloch norms and their angle."""
    T1, T2 = _check_temperature(T1), _check_temperature(T2)
    n1, n2 = b1.norm, b2.norm
    c = cos_angle(b1, b2)
    t1 = math.tanh(n1 / (2.0 * T1))
    t2 = math.tanh(n2 / (2.0 * T2))
    lower = n2 / (2.0 * T2) * (c * t1 - t2)
    upper = n1 / (2.0 * T1) * (t1 - c * t2)
    return BoundsResult(lower, upper, entropy_closed(n2, T2) - entropy_closed(n1, T1))


def theta_sweep(norm1: float, norm2: float, T1: float, T2: float, n: int = 200, h0: float = 0.0, g0: float = 0.0):
    """Bounds as a function of the inter-vector angle on ``[0, pi]``.

    Returns ``(theta, rows)`` where each row is a :class:`BoundsResult`.
    """
    thetas = np.linspace(0.0, math.pi, n)
    b1 = BlochHamiltonian(h0, (0.0, 0.0, norm1))
    rows = [delta_s_bounds_qubit(b1, BlochHamiltonian.from_polar(g0, norm2, th), T1, T2) for th in thetas]
    return thetas, rows


def temperature_sweep(norm1: float, norm2: float, theta: float, T2: float, T1_values=None,
                      h0: float = 0.0, g0: float = 0.0):
    """Bounds as a function of ``T1`` at fixed angle; default grid is 200 points on [1, 30]."""
    T1s = np.linspace(1.0, 30.0, 200) if T1_values is None else np.asarray(T1_values, dtype=float)
    b1 = BlochHamiltonian(h0, (0.0, 0.0, norm1))
    b2 = BlochHamiltonian.from_polar(g0, norm2, theta)
    return T1s, [delta_s_bounds_qubit(b1, b2, T1, T2) for T1 in T1s]
