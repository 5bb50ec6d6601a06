"""Time-dependent oscillator frequencies.

A profile supplies ``omega(t)``, ``omega(t)**2`` and ``d(omega**2)/dt``. The
three closed forms are

* ``constant``:    ``omega0``
* ``sqrt_linear``: ``omega0 * sqrt(offset + eta * t)``  (``offset=0, eta=1`` gives ``sqrt(t)``)
* ``paul_trap``:   ``omega0 * sqrt(1 + eta * cos(Omega * t))``

and ``tabulated`` interpolates ``omega**2`` from samples with a monotone
cubic (PCHIP), which cannot undershoot the smallest sample.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ValidationError

KINDS = ("constant", "sqrt_linear", "paul_trap", "tabulated")


@dataclass(frozen=True)
class FrequencyProfile:
    kind: str
    omega0: float = 1.0
    eta: float = 0.0
    Omega: float = 0.0
    offset: float = 1.0
    table: tuple | None = field(default=None, repr=False)
    _pchip: PchipInterpolator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown profile kind {self.kind!r}; choose from {KINDS}")
        for name in ("omega0", "eta", "Omega", "offset"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValidationError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.omega0 <= 0:
            raise ValidationError(f"omega0 must be positive, got {self.omega0}")
        if self.kind == "tabulated":
            if self.table is None:
                raise ValidationError("tabulated profile needs (t, omega) samples")
            t, w = (np.asarray(a, dtype=float) for a in self.table)
            if t.ndim != 1 or t.shape != w.shape or t.size < 2:
                raise ValidationError("table needs matching 1-D t and omega arrays of length >= 2")
            if np.any(np.diff(t) <= 0):
                raise ValidationError("table times must be strictly increasing")
            if np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise ValidationError("tabulated frequencies must be positive and finite")
            object.__setattr__(self, "table", (tuple(t), tuple(w)))
            object.__setattr__(self, "_pchip", PchipInterpolator(t, w * w, extrapolate=False))

    # constructors

    @classmethod
    def constant(cls, omega0: float = 1.0) -> FrequencyProfile:
        return cls("constant", omega0=omega0)

    @classmethod
    def sqrt_linear(cls, omega0: float = 1.0, eta: float = 1.0, offset: float = 1.0) -> FrequencyProfile:
        return cls("sqrt_linear", omega0=omega0, eta=eta, offset=offset)

    @classmethod
    def paul_trap(cls, omega0: float = 1.0, eta: float = 0.5, Omega: float = 2.0) -> FrequencyProfile:
        if abs(eta) >= 1:
            raise ValidationError(f"paul_trap needs |eta| < 1 for a positive frequency, got {eta}")
        return cls("paul_trap", omega0=omega0, eta=eta, Omega=Omega)

    @classmethod
    def tabulated(cls, t, omega) -> FrequencyProfile:
        return cls("tabulated", table=(t, omega))

    # evaluation

    def omega2(self, t):
        t = np.asarray(t, dtype=float)
        w02 = self.omega0 * self.omega0
        if self.kind == "constant":
            out = np.full_like(t, w02)
        elif self.kind == "sqrt_linear":
            out = w02 * (self.offset + self.eta * t)
        elif self.kind == "paul_trap":
            out = w02 * (1.0 + self.eta * np.cos(self.Omega * t))
        else:
            out = self._pchip(t)
            if np.any(np.isnan(out)):
                raise ValidationError("time outside the tabulated range")
        return out[()] if out.ndim == 0 else out

    def domega2(self, t):
        t = np.asarray(t, dtype=float)
        w02 = self.omega0 * self.omega0
        if self.kind == "constant":
            out = np.zeros_like(t)
        elif self.kind == "sqrt_linear":
            out = np.full_like(t, w02 * self.eta)
        elif self.kind == "paul_trap":
            out = -w02 * self.eta * self.Omega * np.sin(self.Omega * t)
        else:
            out = self._pchip.derivative()(t)
        return out[()] if out.ndim == 0 else out

    def omega(self, t):
        """Frequency at ``t``; raises if it is not strictly positive there."""
        w2 = self.omega2(t)
        if np.any(w2 <= 0):
            raise ValidationError("frequency is not positive at the requested time")
        return np.sqrt(w2)

    def min_omega2(self, t0: float, t1: float) -> float:
        """Lower bound of ``omega**2`` on ``[t0, t1]``."""
        w02 = self.omega0 * self.omega0
        if self.kind == "constant":
            return w02
        if self.kind == "sqrt_linear":
            return w02 * min(self.offset + self.eta * t0, self.offset + self.eta * t1)
        if self.kind == "paul_trap":
            if self.Omega == 0.0:
                return w02 * (1.0 + self.eta)
            return w02 * (1.0 - abs(self.eta))
        t, w = (np.asarray(a) for a in self.table)
        if t0 < t[0] or t1 > t[-1]:
            raise ValidationError(f"window [{t0}, {t1}] leaves the table range [{t[0]}, {t[-1]}]")
        return float(np.min(w) ** 2)

    def kernel_spec(self):
        """``(kind code, params, breakpoints, coefficients)`` for the compiled core."""
        params = np.array([self.omega0, self.eta, self.Omega, self.offset])
        if self.kind == "tabulated":
            pp = self._pchip
            return KINDS.index(self.kind), params, np.ascontiguousarray(pp.x), np.ascontiguousarray(pp.c)
        return KINDS.index(self.kind), params, np.zeros(2), np.zeros((4, 1))

    def to_json(self) -> dict:
        d = {"kind": self.kind, "omega0": self.omega0, "eta": self.eta,
             "Omega": self.Omega, "offset": self.offset}
        if self.table is not None:
            d["table"] = [list(self.table[0]), list(self.table[1])]
        return d
