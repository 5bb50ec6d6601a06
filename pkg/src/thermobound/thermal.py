"""Thermal equilibrium states and the relative-entropy bounds between two of them.

Every bound here comes from the two positivity conditions
``D(rho1 || rho2) >= 0`` and ``D(rho2 || rho1) >= 0``. For the entropy
difference the slacks are exactly those relative entropies::

    exact - lower = D(rho1 || rho2)
    upper - exact = D(rho2 || rho1)

Units: hbar = k_B = 1, so ``beta = 1 / T``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, NumericalConsistencyError, ValidationError
from .spectral import (
    HermitianOperator,
    SpectralDecomposition,
    _same_dim,
    as_operator,
    boltzmann_factors,
    eigendecompose,
    mean_value,
)

log = logging.getLogger(__name__)

T_MIN = 1e-6
P_FLOOR = 1e-300
SANDWICH_TOL = 1e-9


def _check_temperature(T) -> float:
    T = float(T)
    if not math.isfinite(T) or T < T_MIN:
        raise ValidationError(f"temperature must be finite and >= {T_MIN}, got {T}")
    return T


@dataclass(frozen=True)
class ThermalSpec:
    H: HermitianOperator
    T: float

    def __post_init__(self):
        object.__setattr__(self, "H", as_operator(self.H))
        object.__setattr__(self, "T", _check_temperature(self.T))

    @property
    def beta(self) -> float:
        return 1.0 / self.T

    @classmethod
    def from_json(cls, obj) -> ThermalSpec:
        return cls(HermitianOperator.from_json(obj["H"]), obj["T"])

    def to_json(self) -> dict:
        return {"H": self.H.to_json(), "T": self.T}


@dataclass(frozen=True)
class GrandThermalSpec:
    """Grand-canonical pair ``exp(beta (mu N - H))``; ``H`` and ``N`` need not commute."""

    H: HermitianOperator
    N: HermitianOperator
    T: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "H", as_operator(self.H))
        object.__setattr__(self, "N", as_operator(self.N))
        _same_dim(self.H, self.N)
        object.__setattr__(self, "T", _check_temperature(self.T))
        mu = float(self.mu)
        if not math.isfinite(mu):
            raise ValidationError(f"chemical potential must be finite, got {mu}")
        object.__setattr__(self, "mu", mu)

    @property
    def beta(self) -> float:
        return 1.0 / self.T

    @property
    def generator(self) -> HermitianOperator:
        """``H - mu N``, so that the state is ``exp(-beta * generator) / Z``."""
        return self.H - self.mu * self.N

    @classmethod
    def from_json(cls, obj) -> GrandThermalSpec:
        return cls(
            HermitianOperator.from_json(obj["H"]),
            HermitianOperator.from_json(obj["N"]),
            obj["T"],
            obj.get("mu", 0.0),
        )

    def to_json(self) -> dict:
        return {"H": self.H.to_json(), "N": self.N.to_json(), "T": self.T, "mu": self.mu}


@dataclass(frozen=True)
class ThermalState:
    """Density matrix with cached thermodynamic scalars.

    ``log_z`` is stored rather than ``Z`` so that states with very large or
    very small partition functions stay representable; ``Z`` is derived.
    For grand-canonical states ``Z`` is the grand partition function.
    """

    rho: np.ndarray
    T: float
    log_z: float
    E: float
    S: float
    probabilities: np.ndarray = field(repr=False)
    log_probabilities: np.ndarray = field(repr=False)
    basis: np.ndarray = field(repr=False)

    @property
    def Z(self) -> float:
        return math.exp(self.log_z)

    @property
    def F(self) -> float:
        return -self.T * self.log_z

    @property
    def beta(self) -> float:
        return 1.0 / self.T

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def log_rho(self) -> np.ndarray:
        U = self.basis
        return (U * self.log_probabilities) @ U.conj().T


def _entropy_from_probs(p: np.ndarray, logp: np.ndarray | None = None) -> float:
    p = np.asarray(p, dtype=float)
    mask = p >= P_FLOOR
    if logp is None:
        terms = p[mask] * np.log(p[mask])
    else:
        terms = p[mask] * logp[mask]
    return float(-np.sum(terms))


def _state(generator: HermitianOperator, H: HermitianOperator, T: float) -> ThermalState:
    dec: SpectralDecomposition = eigendecompose(generator)
    beta = 1.0 / T
    lam = dec.eigenvalues
    shift = float(lam[0])
    w = boltzmann_factors(lam, beta, shift)
    s = float(np.sum(w))
    log_z = math.log(s) - beta * shift
    logp = -beta * (lam - shift) - math.log(s)
    p = w / s
    U = dec.eigenvectors
    rho = (U * p) @ U.conj().T
    rho.setflags(write=False)
    return ThermalState(
        rho=rho,
        T=T,
        log_z=log_z,
        E=mean_value(rho, H),
        S=_entropy_from_probs(p, logp),
        probabilities=p,
        log_probabilities=logp,
        basis=U,
    )


def gibbs_state(spec: ThermalSpec) -> ThermalState:
    """Canonical state ``exp(-H/T) / Z``."""
    return _state(spec.H, spec.H, spec.T)


def grand_gibbs_state(spec: GrandThermalSpec) -> ThermalState:
    """Grand-canonical state ``exp((mu N - H)/T) / Z``, with ``E = Tr(rho H)``."""
    return _state(spec.generator, spec.H, spec.T)


def von_neumann_entropy(rho) -> float:
    """``-Tr(rho ln rho)`` of an arbitrary density matrix (``0 ln 0 = 0``)."""
    r = np.asarray(rho, dtype=complex)
    p = np.linalg.eigvalsh(0.5 * (r + r.conj().T))
    return _entropy_from_probs(np.clip(p, 0.0, None))


def _as_state(x) -> ThermalState:
    if isinstance(x, ThermalState):
        return x
    if isinstance(x, ThermalSpec):
        return gibbs_state(x)
    if isinstance(x, GrandThermalSpec):
        return grand_gibbs_state(x)
    raise TypeError(f"expected a thermal state or spec, got {type(x).__name__}")


def relative_entropy(rho, sigma) -> float:
    """``Tr(rho (ln rho - ln sigma))`` between two thermal states.

    Both logarithms are taken spectrally from each state's own eigenbasis
    (never through the Hamiltonian), which keeps this an independent check
    on the bound slacks.
    """
    rho = _as_state(rho)
    sigma = _as_state(sigma)
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"state dimensions differ: {rho.dim} vs {sigma.dim}")
    V = sigma.basis
    occ = np.real(np.einsum("ij,jk,ki->i", V.conj().T, rho.rho, V))
    cross = float(np.sum(occ * sigma.log_probabilities))
    return -rho.S - cross


@dataclass(frozen=True)
class BoundsResult:
    """A ``lower <= exact <= upper`` sandwich.

    ``guaranteed`` is False when the inputs do not satisfy the assumptions
    of the derivation (truncated overlap data); ``mode`` names the regime.
    """

    lower: float
    upper: float
    exact: float | None = None
    guaranteed: bool = True
    mode: str = "complete"

    @property
    def slack_lower(self) -> float | None:
        return None if self.exact is None else self.exact - self.lower

    @property
    def slack_upper(self) -> float | None:
        return None if self.exact is None else self.upper - self.exact

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def holds(self, tol: float = SANDWICH_TOL) -> bool:
        if self.lower > self.upper + tol:
            return False
        if self.exact is None:
            return True
        return self.lower - tol <= self.exact <= self.upper + tol

    def as_row(self) -> tuple[float, float, float, float, float]:
        """CSV order: lower, exact, upper, slack_lower, slack_upper."""
        nan = float("nan")
        return (
            self.lower,
            nan if self.exact is None else self.exact,
            self.upper,
            nan if self.exact is None else self.slack_lower,
            nan if self.exact is None else self.slack_upper,
        )


CSV_COLUMNS = ("lower", "exact", "upper", "slack_lower", "slack_upper")


def entropy_difference_forms(s1: ThermalSpec, s2: ThermalSpec) -> tuple[float, float]:
    """``S2 - S1`` directly and via ``E2/T2 - E1/T1 + ln(Z2/Z1)``."""
    r1, r2 = gibbs_state(s1), gibbs_state(s2)
    direct = r2.S - r1.S
    via_energy = r2.E / r2.T - r1.E / r1.T + (r2.log_z - r1.log_z)
    return direct, via_energy


def delta_s_exact(s1: ThermalSpec, s2: ThermalSpec) -> float:
    """Exact entropy difference ``S(H2, T2) - S(H1, T1)``.

    The two specs may live in spaces of different dimension.
    """
    direct, via_energy = entropy_difference_forms(s1, s2)
    gap = abs(direct - via_energy)
    if gap > 1e-9 * (1.0 + abs(direct)):
        log.warning("entropy difference forms disagree by %.3e", gap)
    return direct


def _cross_dim(s1, s2):
    if s1.H.dim != s2.H.dim:
        raise DimensionMismatchError(
            f"cross traces need a shared space: dims {s1.H.dim} and {s2.H.dim}"
        )


def _agree(a: float, b: float, what: str, tol: float = 1e-10):
    if abs(a - b) > tol * (1.0 + abs(a) + abs(b)):
        raise NumericalConsistencyError(f"{what}: {a!r} vs {b!r}")


def delta_s_bounds(s1: ThermalSpec, s2: ThermalSpec) -> BoundsResult:
    """Bounds on ``S2 - S1`` from the complementary mean energies.

    ``lower = (E2 - Tr(rho1 H2)) / T2`` and ``upper = (Tr(rho2 H1) - E1) / T1``.
    The equivalent ``Delta E``/``Delta H`` arrangement is evaluated as well and
    must agree.
    """
    _cross_dim(s1, s2)
    r1, r2 = gibbs_state(s1), gibbs_state(s2)
    h2_in_1 = mean_value(r1.rho, s2.H)
    h1_in_2 = mean_value(r2.rho, s1.H)
    lower = (r2.E - h2_in_1) / s2.T
    upper = (h1_in_2 - r1.E) / s1.T

    dE = r2.E - r1.E
    dH = s2.H - s1.H
    _agree(lower, (dE - mean_value(r1.rho, dH)) / s2.T, "lower bound, Delta-form")
    _agree(upper, (dE - mean_value(r2.rho, dH)) / s1.T, "upper bound, Delta-form")
    return BoundsResult(lower, upper, r2.S - r1.S)


def _ratio_bounds(s1: ThermalSpec, s2: ThermalSpec) -> tuple[float, float, float]:
    _cross_dim(s1, s2)
    r1, r2 = gibbs_state(s1), gibbs_state(s2)
    op = s1.H / s1.T - s2.H / s2.T
    return mean_value(r1.rho, op), mean_value(r2.rho, op), r2.log_z - r1.log_z


def log_z_ratio_bounds(s1: ThermalSpec, s2: ThermalSpec) -> BoundsResult:
    """Bounds on ``ln(Z2 / Z1)``: ``Tr(rho_k (H1/T1 - H2/T2))`` for k = 1, 2."""
    lo, hi, exact = _ratio_bounds(s1, s2)
    return BoundsResult(lo, hi, exact)


def helmholtz_bounds(s1: ThermalSpec, s2: ThermalSpec) -> BoundsResult:
    """Bounds on ``F1/T1 - F2/T2``; same trace expressions as the ln Z ratio."""
    lo, hi, _ = _ratio_bounds(s1, s2)
    f1 = gibbs_state(s1).F
    f2 = gibbs_state(s2).F
    return BoundsResult(lo, hi, f1 / s1.T - f2 / s2.T)


def kinetic_potential_bounds(K1, V1, K2, V2, T1, T2) -> BoundsResult:
    """Entropy-difference bounds with each Hamiltonian split as ``K + V``.

    Uses ``<O_j>_k = Tr(rho_k O_j)`` for the four operators separately.
    """
    K1, V1, K2, V2 = map(as_operator, (K1, V1, K2, V2))
    _same_dim(K1, V1, K2, V2)
    s1 = ThermalSpec(K1 + V1, T1)
    s2 = ThermalSpec(K2 + V2, T2)
    r1, r2 = gibbs_state(s1), gibbs_state(s2)

    def m(r, op):
        return mean_value(r.rho, op)

    lower = (m(r2, K2) + m(r2, V2) - m(r1, K2) - m(r1, V2)) / s2.T
    upper = (m(r2, K1) + m(r2, V1) - m(r1, K1) - m(r1, V1)) / s1.T
    return BoundsResult(lower, upper, r2.S - r1.S)


def gibbs_potential(spec: GrandThermalSpec, state: ThermalState | None = None) -> float:
    """``G = Tr(rho H) + T (ln Z - S)`` (equal to ``mu <N>`` at equilibrium)."""
    st = state if state is not None else grand_gibbs_state(spec)
    return st.E + spec.T * (st.log_z - st.S)


def grand_entropy_gap(rho, spec: GrandThermalSpec) -> float:
    """``ln Z - Tr(rho (mu N - H)) / T - S(rho)``; zero only at equilibrium."""
    r = np.asarray(rho, dtype=complex)
    if r.shape != (spec.H.dim, spec.H.dim):
        raise DimensionMismatchError(f"rho shape {r.shape} vs operator dim {spec.H.dim}")
    st = grand_gibbs_state(spec)
    rhs = st.log_z - mean_value(r, spec.mu * spec.N - spec.H) / spec.T
    return rhs - von_neumann_entropy(r)


def _grand_pair(g1: GrandThermalSpec, g2: GrandThermalSpec):
    _same_dim(g1.H, g1.N, g2.H, g2.N)
    r1, r2 = grand_gibbs_state(g1), grand_gibbs_state(g2)
    x1 = g1.mu * g1.N - g1.H
    x2 = g2.mu * g2.N - g2.H
    return r1, r2, x1, x2


def grand_delta_s_bounds(g1: GrandThermalSpec, g2: GrandThermalSpec) -> BoundsResult:
    """Entropy-difference bounds between two grand-canonical states."""
    r1, r2, x1, x2 = _grand_pair(g1, g2)
    G1 = gibbs_potential(g1, r1)
    G2 = gibbs_potential(g2, r2)
    lower = (mean_value(r1.rho, x2) - G2 + r2.E) / g2.T
    upper = (G1 - r1.E - mean_value(r2.rho, x1)) / g1.T
    return BoundsResult(lower, upper, r2.S - r1.S)


def grand_log_z_ratio_bounds(g1: GrandThermalSpec, g2: GrandThermalSpec) -> BoundsResult:
    """Bounds on ``ln(Z2 / Z1)`` for grand partition functions."""
    r1, r2, x1, x2 = _grand_pair(g1, g2)
    G1 = gibbs_potential(g1, r1)
    G2 = gibbs_potential(g2, r2)
    lower = (r1.E - G1) / g1.T + mean_value(r1.rho, x2) / g2.T
    upper = (G2 - r2.E) / g2.T - mean_value(r2.rho, x1) / g1.T
    return BoundsResult(lower, upper, r2.log_z - r1.log_z)


def grand_cross_means(g1: GrandThermalSpec, g2: GrandThermalSpec) -> dict[str, float]:
    """Post-quench means ``Tr(rho1 N2)``, ``Tr(rho1 H2)`` and the reverse pair (diagnostics)."""
    r1, r2, _, _ = _grand_pair(g1, g2)
    return {
        "N2_in_1": mean_value(r1.rho, g2.N),
        "H2_in_1": mean_value(r1.rho, g2.H),
        "N1_in_2": mean_value(r2.rho, g1.N),
        "H1_in_2": mean_value(r2.rho, g1.H),
    }
