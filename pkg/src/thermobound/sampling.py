"""Random inputs for property sweeps.

All generators take a ``numpy.random.Generator`` so that sweeps are
reproducible from a single seed.
"""
from __future__ import annotations

import math

import numpy as np

from .spectral import HermitianOperator
from .thermal import GrandThermalSpec, ThermalSpec


def log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> HermitianOperator:
    """GUE-like matrix with entries of order ``scale``."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(0.5 * scale * (a + a.conj().T))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_spec_pair(rng: np.random.Generator, dims=(2, 8), temps=(0.1, 100.0)):
    """Two canonical specs of a common random dimension with log-uniform temperatures."""
    d = int(rng.integers(dims[0], dims[1] + 1))
    return (ThermalSpec(random_hermitian(rng, d), log_uniform(rng, *temps)),
            ThermalSpec(random_hermitian(rng, d), log_uniform(rng, *temps)))


def random_number_operator(rng: np.random.Generator, dim: int, n_max: int = 3) -> HermitianOperator:
    """Integer spectrum in ``[0, n_max]`` in a random basis."""
    U = random_unitary(rng, dim)
    occ = rng.integers(0, n_max + 1, size=dim).astype(float)
    return HermitianOperator((U * occ) @ U.conj().T)


def random_grand_spec(rng: np.random.Generator, dim: int, temps=(0.1, 100.0),
                      mu_range=(-2.0, 2.0), commuting: bool = True) -> GrandThermalSpec:
    """Grand-canonical spec; with ``commuting`` the number operator shares ``H``'s eigenbasis."""
    if commuting:
        U = random_unitary(rng, dim)
        H = HermitianOperator((U * rng.normal(size=dim)) @ U.conj().T)
        N = HermitianOperator((U * rng.integers(0, 4, size=dim).astype(float)) @ U.conj().T)
    else:
        H = random_hermitian(rng, dim)
        N = random_number_operator(rng, dim)
    return GrandThermalSpec(H, N, log_uniform(rng, *temps), float(rng.uniform(*mu_range)))
