"""Bounds from eigenvalues and overlap (Franck-Condon) factors alone.

``k[j, l] = |<e_j(1) | e_l(2)>|^2`` where ``e(1)`` and ``e(2)`` are the
eigenbases of the two Hamiltonians. With complete bases ``k`` is doubly
stochastic and every quantity matches the matrix route in
:mod:`thermobound.thermal`.

Overlap data can also be supplied directly, e.g. tabulated molecular
factors. When such a matrix is only row-stochastic (a truncated level set)
the sandwich is no longer implied, so results carry
``guaranteed=False`` and ``mode="truncated-overlap"``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .spectral import eigendecompose
from .thermal import BoundsResult, _check_temperature, _entropy_from_probs

STOCHASTIC_TOL = 1e-8
MAX_LEVELS = 4096


@dataclass(frozen=True)
class SpectralSystem:
    levels: np.ndarray
    basis: np.ndarray | None = None

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float).ravel()
        if lv.size == 0 or lv.size > MAX_LEVELS:
            raise ValidationError(f"level count must be in [1, {MAX_LEVELS}], got {lv.size}")
        if not np.all(np.isfinite(lv)):
            raise ValidationError("levels must be finite")
        object.__setattr__(self, "levels", lv)
        if self.basis is not None:
            U = np.asarray(self.basis, dtype=complex)
            if U.shape != (lv.size, lv.size):
                raise DimensionMismatchError(f"basis shape {U.shape} vs {lv.size} levels")
            if np.max(np.abs(U.conj().T @ U - np.eye(lv.size))) > 1e-8:
                raise ValidationError("basis is not unitary")
            object.__setattr__(self, "basis", U)

    @property
    def dim(self) -> int:
        return self.levels.size

    @classmethod
    def from_operator(cls, H) -> SpectralSystem:
        dec = eigendecompose(H)
        return cls(dec.eigenvalues, dec.eigenvectors)

    def hamiltonian(self) -> np.ndarray:
        if self.basis is None:
            raise ValidationError("system has no basis")
        U = self.basis
        return (U * self.levels) @ U.conj().T


@dataclass(frozen=True)
class OverlapMatrix:
    """Row-stochastic overlap matrix; ``complete`` when columns also sum to one."""

    k: np.ndarray
    complete: bool

    @classmethod
    def from_array(cls, k) -> OverlapMatrix:
        k = np.asarray(k, dtype=float)
        if k.ndim != 2:
            raise ValidationError(f"overlap matrix must be 2-D, got shape {k.shape}")
        if np.any(k < -STOCHASTIC_TOL) or np.any(k > 1 + STOCHASTIC_TOL):
            raise ValidationError("overlap factors must lie in [0, 1]")
        rows = k.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > STOCHASTIC_TOL:
            raise ValidationError(
                f"overlap rows must sum to 1 (max deviation {np.max(np.abs(rows - 1.0)):.3e})"
            )
        cols = k.sum(axis=0)
        complete = k.shape[0] == k.shape[1] and np.max(np.abs(cols - 1.0)) <= STOCHASTIC_TOL
        k = k.copy()
        k.setflags(write=False)
        return cls(k, bool(complete))

    @property
    def shape(self) -> tuple[int, int]:
        return self.k.shape


def boltzmann_probs(sys, T) -> np.ndarray:
    """Occupation probabilities ``exp(-e_j/T) / sum exp(-e_j'/T)``."""
    T = _check_temperature(T)
    levels = sys.levels if isinstance(sys, SpectralSystem) else np.asarray(sys, dtype=float)
    x = -(levels - levels.min()) / T
    w = np.exp(x)
    return w / w.sum()


def _log_z(levels: np.ndarray, T: float) -> float:
    e0 = levels.min()
    return math.log(np.sum(np.exp(-(levels - e0) / T))) - e0 / T


def overlap_matrix(sys1: SpectralSystem, sys2: SpectralSystem) -> OverlapMatrix:
    if sys1.basis is None or sys2.basis is None:
        raise ValidationError("overlap factors need both eigenbases")
    if sys1.dim != sys2.dim:
        raise DimensionMismatchError(f"dimensions differ: {sys1.dim} vs {sys2.dim}")
    k = np.abs(sys1.basis.conj().T @ sys2.basis) ** 2
    return OverlapMatrix.from_array(k)


def _as_overlap(k, sys1, sys2) -> OverlapMatrix:
    if k is None:
        return overlap_matrix(sys1, sys2)
    k = k if isinstance(k, OverlapMatrix) else OverlapMatrix.from_array(k)
    if k.shape != (sys1.dim, sys2.dim):
        raise DimensionMismatchError(f"overlap shape {k.shape} vs levels ({sys1.dim}, {sys2.dim})")
    return k


def cross_means_fc(p1, p2, levels1, levels2, k) -> tuple[float, float]:
    """Complementary means ``(Tr(rho1 H2), Tr(rho2 H1))`` from overlap factors.

    ``Tr(rho1 H2) = sum_jl p1_j e2_l k_jl`` and
    ``Tr(rho2 H1) = sum_jl p2_l e1_j k_jl``.
    """
    kk = k.k if isinstance(k, OverlapMatrix) else np.asarray(k, dtype=float)
    p1, p2 = np.asarray(p1, float), np.asarray(p2, float)
    l1, l2 = np.asarray(levels1, float), np.asarray(levels2, float)
    if kk.shape != (p1.size, p2.size) or l1.size != p1.size or l2.size != p2.size:
        raise DimensionMismatchError(
            f"inconsistent sizes: k {kk.shape}, p1 {p1.size}, p2 {p2.size}, "
            f"levels {l1.size}/{l2.size}"
        )
    return float(p1 @ kk @ l2), float(l1 @ kk @ p2)


def _fc_parts(sys1, sys2, T1, T2, k):
    T1, T2 = _check_temperature(T1), _check_temperature(T2)
    k = _as_overlap(k, sys1, sys2)
    p1 = boltzmann_probs(sys1, T1)
    p2 = boltzmann_probs(sys2, T2)
    h2_in_1, h1_in_2 = cross_means_fc(p1, p2, sys1.levels, sys2.levels, k)
    e1 = float(p1 @ sys1.levels)
    e2 = float(p2 @ sys2.levels)
    return T1, T2, k, p1, p2, e1, e2, h2_in_1, h1_in_2


def _result(lower, upper, exact, k: OverlapMatrix) -> BoundsResult:
    if k.complete:
        return BoundsResult(lower, upper, exact)
    return BoundsResult(lower, upper, exact, guaranteed=False, mode="truncated-overlap")


def delta_s_bounds_fc(sys1, sys2, T1, T2, k=None) -> BoundsResult:
    """Entropy-difference bounds from levels and overlap factors.

    ``k`` defaults to the overlaps of the two systems' bases.
    """
    T1, T2, k, p1, p2, e1, e2, h2_in_1, h1_in_2 = _fc_parts(sys1, sys2, T1, T2, k)
    lower = (e2 - h2_in_1) / T2
    upper = (h1_in_2 - e1) / T1
    exact = _entropy_from_probs(p2) - _entropy_from_probs(p1)
    return _result(lower, upper, exact, k)


def helmholtz_bounds_fc(sys1, sys2, T1, T2, k=None) -> BoundsResult:
    """Bounds on ``F1/T1 - F2/T2`` from levels and overlap factors."""
    T1, T2, k, p1, p2, e1, e2, h2_in_1, h1_in_2 = _fc_parts(sys1, sys2, T1, T2, k)
    lower = e1 / T1 - h2_in_1 / T2
    upper = h1_in_2 / T1 - e2 / T2
    # F/T = -ln Z
    exact = _log_z(sys2.levels, T2) - _log_z(sys1.levels, T1)
    return _result(lower, upper, exact, k)


def same_spectrum_bounds(levels1, levels2, T1, T2) -> tuple[BoundsResult, BoundsResult]:
    """Closed sums for identity overlaps: (entropy bounds, Helmholtz bounds).

    Entropy: ``sum (P_j(T2) - P_j(T1)) e2_j / T2`` and ``sum (P_j(T2) - P_j(T1)) e1_j / T1``.
    Helmholtz: ``sum P_j(T1) (e1_j/T1 - e2_j/T2)`` and ``sum P_j(T2) (e1_j/T1 - e2_j/T2)``.
    """
    l1, l2 = np.asarray(levels1, float), np.asarray(levels2, float)
    if l1.shape != l2.shape:
        raise DimensionMismatchError("same-spectrum form needs equally many levels")
    p1 = boltzmann_probs(l1, T1)
    p2 = boltzmann_probs(l2, T2)
    ds = BoundsResult(
        float((p2 - p1) @ l2) / T2,
        float((p2 - p1) @ l1) / T1,
        _entropy_from_probs(p2) - _entropy_from_probs(p1),
    )
    mixed = l1 / T1 - l2 / T2
    hf = BoundsResult(float(p1 @ mixed), float(p2 @ mixed), _log_z(l2, T2) - _log_z(l1, T1))
    return ds, hf
