"""Classical solution of ``eps'' + omega(t)^2 eps = 0`` with ``eps(0) = 1, eps'(0) = i``.

The Wronskian ``eps' conj(eps) - eps conj(eps') = 2i`` is conserved exactly
by the true flow; :func:`solve_classical` refuses trajectories whose drift
exceeds :data:`WRONSKIAN_TOL`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._rk_py import MAX_STEPS, NEGATIVE_OMEGA2, STEP_UNDERFLOW
from .errors import IntegrationError, ValidationError
from .profiles import FrequencyProfile

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
WRONSKIAN_TOL = 1e-8
_RANGE_SLACK = 1e-12


def wronskian(eps, deps):
    return deps * np.conj(eps) - eps * np.conj(deps)


def _dense_eval(F, x, y_old):
    """DOP853 dense output: ``F`` is ``(..., 7, 4)``, ``x`` in ``[0, 1]``."""
    xs = x[..., None]
    y = np.zeros_like(y_old)
    for k in range(F.shape[-2]):
        y = y + F[..., F.shape[-2] - 1 - k, :]
        y = y * (xs if k % 2 == 0 else 1.0 - xs)
    return y + y_old


@dataclass(frozen=True)
class ClassicalSolution:
    """Accepted integrator steps plus a dense-output accessor.

    Between grid points the state is reconstructed from the integrator's
    own 7th-order continuous extension.
    """

    profile: FrequencyProfile
    grid: np.ndarray
    eps: np.ndarray
    deps: np.ndarray
    dense: np.ndarray = field(repr=False)
    n_rejected: int = 0
    backend: str = "python"

    def __post_init__(self):
        for a in (self.grid, self.eps, self.deps, self.dense):
            a.setflags(write=False)

    @property
    def t_max(self) -> float:
        return float(self.grid[-1])

    def wronskian_drift(self) -> float:
        return float(np.max(np.abs(wronskian(self.eps, self.deps) - 2j)))

    def __call__(self, t):
        """``(eps(t), eps'(t))`` at scalar or array ``t`` inside the solved range."""
        t = np.asarray(t, dtype=float)
        if np.any(t < -_RANGE_SLACK) or np.any(t > self.t_max + _RANGE_SLACK * max(1.0, self.t_max)):
            raise ValidationError(f"time outside solved range [0, {self.t_max}]")
        tc = np.clip(t, 0.0, self.t_max)
        g = self.grid
        i = np.clip(np.searchsorted(g, tc, side="right") - 1, 0, len(g) - 2)
        x = (tc - g[i]) / (g[i + 1] - g[i])
        y_old = np.stack([self.eps[i].real, self.eps[i].imag,
                          self.deps[i].real, self.deps[i].imag], axis=-1)
        y = _dense_eval(self.dense[i], x, y_old)
        eps = y[..., 0] + 1j * y[..., 1]
        deps = y[..., 2] + 1j * y[..., 3]
        if eps.ndim == 0:
            return complex(eps), complex(deps)
        return eps, deps


def solve_classical(profile: FrequencyProfile, t_max: float, tol: float = DEFAULT_TOL,
                    backend: str | None = None, max_steps: int = 10_000_000) -> ClassicalSolution:
    """Adaptive Dormand-Prince 8(5,3) integration on ``[0, t_max]``.

    ``tol`` is used as both the relative and absolute local tolerance.

    Raises
    ------
    ValidationError
        ``omega**2`` is negative somewhere in the window, or bad arguments.
    IntegrationError
        Step-size underflow, step budget exhausted, or Wronskian drift above
        :data:`WRONSKIAN_TOL` at any accepted step.
    """
    t_max = float(t_max)
    tol = float(tol)
    if not np.isfinite(t_max) or t_max <= 0:
        raise ValidationError(f"t_max must be positive, got {t_max}")
    if not (0 < tol < 1e-2):
        raise ValidationError(f"tol must lie in (0, 1e-2), got {tol}")
    if profile.min_omega2(0.0, t_max) < 0:
        raise ValidationError("omega^2 is negative inside the integration window")

    name, integrate = _kernels.get_integrator(backend)
    kind, params, bx, bc = profile.kernel_spec()
    ts, ys, F, n_acc, n_rej, status, t_fail = integrate(
        kind, params, bx, bc, (1.0, 0.0, 0.0, 1.0), t_max, tol, tol, 1e-3, max_steps
    )
    if status == NEGATIVE_OMEGA2:
        raise ValidationError(f"omega^2 became negative at t = {t_fail}")
    if status == STEP_UNDERFLOW:
        raise IntegrationError(f"step size underflow at t = {t_fail}")
    if status == MAX_STEPS:
        raise IntegrationError(f"step budget of {max_steps} exhausted at t = {t_fail}")

    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    sol = ClassicalSolution(
        profile=profile,
        grid=ts,
        eps=ys[:, 0] + 1j * ys[:, 1],
        deps=ys[:, 2] + 1j * ys[:, 3],
        dense=np.asarray(F, dtype=float).reshape(len(ts) - 1, 7, 4),
        n_rejected=n_rej,
        backend=name,
    )
    drift = sol.wronskian_drift()
    if drift > WRONSKIAN_TOL:
        raise IntegrationError(f"Wronskian drift {drift:.3e} exceeds {WRONSKIAN_TOL:.0e}")
    log.debug("solved to t=%g: %d steps (%d rejected), drift %.2e, backend %s",
              t_max, n_acc, n_rej, drift, name)
    return sol
