"""Dense Hermitian spectral numerics.

Every thermal construction in the package goes through
:func:`eigendecompose`; exponentials of Hermitian operators are always
formed in the eigenbasis.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatchError, NonHermitianError, NumericalConsistencyError, SpectralError, ValidationError

HERMITIAN_RTOL = 1e-9
EXP_BUDGET = 700.0
TRACE_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class HermitianOperator:
    """Dense complex Hermitian matrix (Hamiltonian, number operator, observable).

    The stored entries are symmetrised, ``(H + H^dagger) / 2``, after the
    hermiticity check, so that round-off asymmetry never reaches the
    eigensolver.
    """

    __slots__ = ("entries",)

    def __init__(self, entries, *, check: bool = True):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("operator has non-finite entries")
        if check:
            asym = float(np.max(np.abs(a - a.conj().T)))
            tol = HERMITIAN_RTOL * (1.0 + float(np.max(np.abs(a))))
            if asym > tol:
                raise NonHermitianError(asym, tol)
        object.__setattr__(self, "entries", _readonly(0.5 * (a + a.conj().T)))

    def __setattr__(self, name, value):
        raise AttributeError("HermitianOperator is immutable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __add__(self, other):
        other = as_operator(other)
        _same_dim(self, other)
        return HermitianOperator(self.entries + other.entries, check=False)

    def __sub__(self, other):
        other = as_operator(other)
        _same_dim(self, other)
        return HermitianOperator(self.entries - other.entries, check=False)

    def __neg__(self):
        return HermitianOperator(-self.entries, check=False)

    def __mul__(self, scalar):
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise ValidationError("only real scalars preserve hermiticity")
        return HermitianOperator(float(np.real(scalar)) * self.entries, check=False)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    @classmethod
    def diag(cls, values) -> HermitianOperator:
        return cls(np.diag(np.asarray(values, dtype=float)), check=False)

    @classmethod
    def zeros(cls, dim: int) -> HermitianOperator:
        return cls(np.zeros((dim, dim)), check=False)

    @classmethod
    def identity(cls, dim: int) -> HermitianOperator:
        return cls(np.eye(dim), check=False)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj) -> HermitianOperator:
        """Build from ``{"dim": n, "re": [[...]], "im": [[...]]}`` (``im`` optional).

        A bare nested list is accepted as a real matrix.
        """
        if isinstance(obj, str):
            obj = json.loads(obj)
        if isinstance(obj, list):
            return cls(np.asarray(obj, dtype=float))
        try:
            re = np.asarray(obj["re"], dtype=float)
        except (KeyError, TypeError) as exc:
            raise ValidationError("operator JSON needs a 're' matrix") from exc
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ValidationError(f"'re' {re.shape} and 'im' {im.shape} shapes differ")
        if "dim" in obj and re.shape != (obj["dim"], obj["dim"]):
            raise ValidationError(f"declared dim {obj['dim']} does not match matrix shape {re.shape}")
        return cls(re + 1j * im)


def as_operator(H) -> HermitianOperator:
    return H if isinstance(H, HermitianOperator) else HermitianOperator(H)


def _same_dim(*ops) -> int:
    dims = {op.dim if isinstance(op, HermitianOperator) else np.shape(op)[0] for op in ops}
    if len(dims) != 1:
        raise DimensionMismatchError(f"operator dimensions differ: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and a unitary whose column ``j`` belongs to ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def apply(self, fn) -> np.ndarray:
        """Matrix function ``U f(Lambda) U^dagger``."""
        U = self.eigenvectors
        return (U * fn(self.eigenvalues)) @ U.conj().T


def _canonical_basis(vecs: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(vecs).

    Projects the standard basis vectors, in ascending index order, onto the
    subspace and Gram-Schmidts them until the dimension is filled.
    """
    d, k = vecs.shape
    P = vecs @ vecs.conj().T
    out = []
    for i in range(d):
        v = P[:, i].copy()
        for q in out:
            v -= q * (q.conj() @ v)
        n = np.linalg.norm(v)
        if n > 1e-6:
            out.append(v / n)
            if len(out) == k:
                break
    if len(out) < k:
        raise SpectralError("could not build a basis for a degenerate eigenspace")
    Q = np.column_stack(out)
    # second pass restores orthogonality lost to cancellation
    Q, _ = np.linalg.qr(Q)
    return Q


def _fix_phases(U: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(U), axis=0)
    lead = U[idx, np.arange(U.shape[1])]
    return U * (np.abs(lead) / lead)


def eigendecompose(H) -> SpectralDecomposition:
    """Eigendecomposition with deterministic tie-breaking.

    Degenerate eigenspaces (eigenvalues closer than ``1e-9 * max(1, ||H||)``)
    receive the Gram-Schmidt basis of :func:`_canonical_basis`; every column
    is then rotated so that its largest component is real and positive.
    """
    H = as_operator(H)
    a = H.entries
    try:
        w, U = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigensolver did not converge: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(U))):
        raise SpectralError("eigensolver returned non-finite values")

    gap_tol = 1e-9 * max(1.0, float(np.max(np.abs(a))))
    breaks = np.flatnonzero(np.diff(w) > gap_tol) + 1
    for block in np.split(np.arange(len(w)), breaks):
        if len(block) > 1:
            U[:, block] = _canonical_basis(U[:, block])
            w[block] = np.mean(w[block])
    U = _fix_phases(U)
    return SpectralDecomposition(_readonly(w), _readonly(U))


class BoltzmannWeight(NamedTuple):
    """``matrix = exp(-beta (H - shift))`` and its trace.

    ``shift`` is zero unless the unshifted exponent would leave double range.
    """

    matrix: np.ndarray
    trace: float
    shift: float


def _check_beta(beta) -> float:
    beta = float(beta)
    if not np.isfinite(beta) or beta <= 0:
        raise ValidationError(f"beta must be positive and finite, got {beta}")
    return beta


def boltzmann_factors(eigenvalues: np.ndarray, beta: float, shift: float) -> np.ndarray:
    x = -beta * (np.asarray(eigenvalues) - shift)
    out = np.exp(np.minimum(x, EXP_BUDGET))
    out[x < -EXP_BUDGET] = 0.0
    return out


def boltzmann_weight(H, beta, decomposition: SpectralDecomposition | None = None) -> BoltzmannWeight:
    """Compute ``exp(-beta H)`` and its trace through the eigenbasis of ``H``."""
    beta = _check_beta(beta)
    dec = decomposition if decomposition is not None else eigendecompose(H)
    w = dec.eigenvalues
    needs_shift = beta * max(abs(w[0]), abs(w[-1])) > EXP_BUDGET
    shift = float(w[0]) if needs_shift else 0.0
    weights = boltzmann_factors(w, beta, shift)
    U = dec.eigenvectors
    return BoltzmannWeight((U * weights) @ U.conj().T, float(np.sum(weights)), shift)


def mean_value(rho, A) -> float:
    """``Re Tr(rho A)`` for a density matrix ``rho``.

    Raises
    ------
    DimensionMismatchError
        Shapes of ``rho`` and ``A`` differ.
    NumericalConsistencyError
        ``rho`` is not a unit-trace Hermitian matrix, or the trace has a
        non-negligible imaginary part.
    """
    r = np.asarray(rho, dtype=complex)
    a = A.entries if isinstance(A, HermitianOperator) else np.asarray(A, dtype=complex)
    if r.shape != a.shape or r.ndim != 2:
        raise DimensionMismatchError(f"rho {r.shape} and operator {a.shape} shapes differ")
    tr = np.trace(r)
    if abs(tr - 1.0) > TRACE_TOL * r.shape[0]:
        raise NumericalConsistencyError(f"density matrix trace {tr} is not 1")
    # Tr(rho A) = sum_ij rho_ij A_ji
    val = np.sum(r * a.T)
    scale = 1.0 + float(np.max(np.abs(a)))
    if abs(val.imag) > 1e-10 * scale:
        raise NumericalConsistencyError(f"Tr(rho A) has imaginary part {val.imag:.3e}")
    return float(val.real)
