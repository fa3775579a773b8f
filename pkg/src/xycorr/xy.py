"""Thermodynamic-limit two-spin physics of the anisotropic XY chain.

The chain is ``H = -(lam/2) sum_j [(1+gamma) sx_j sx_{j+1} + (1-gamma) sy_j sy_{j+1}]
- sum_j sz_j``. Magnetisation and the contraction function ``G_r`` are
evaluated as integrals over the Bogoliubov momentum; ``xx`` and ``yy``
correlators are Toeplitz determinants of ``G``.

Temperature convention: ``beta`` enters the integrands as ``tanh(beta * omega)``
with ``omega = sqrt((gamma lam sin phi)^2 + (1 + lam cos phi)^2) / 2``. Those
integrals describe the Gibbs state ``exp(-beta H / 2) / Z`` of the chain
above, i.e. ``beta`` is measured in units of half the transverse-field
coupling. ``beta = inf`` selects the zero-temperature branch (``tanh -> 1``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import DomainError, InvalidStateError
from .linalg import validate_state
from .quadrature import integrate

MAX_SEPARATION = 64
QUAD_TOL = 1e-11
ENDPOINT_SPLIT = 1e-3

# The textbook integral carries an overall minus sign, which yields
# <sz> = -1 at lam = 0 where -sum sz forces +1. Fixed to +1 by the ED check.
MZ_SIGN = 1.0


@dataclass(frozen=True)
class XYParams:
    """Control parameters of the chain and the spin separation.

    ``beta = math.inf`` means zero temperature.
    """

    lam: float
    gamma: float
    beta: float = math.inf
    r: int = 1

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0):
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.lam < 0:
            raise DomainError(f"lam must be >= 0, got {self.lam}")
        if not (self.beta >= 0):
            raise DomainError(f"beta must be >= 0 or inf, got {self.beta}")
        if int(self.r) != self.r or self.r < 1:
            raise DomainError(f"r must be a positive integer, got {self.r}")
        object.__setattr__(self, "r", int(self.r))

    @classmethod
    def from_kT(cls, lam, gamma, kT=0.0, r=1):
        """Build from a temperature; ``kT = 0`` is the ground-state branch."""
        if kT < 0:
            raise DomainError(f"kT must be >= 0, got {kT}")
        beta = math.inf if kT == 0 else 1.0 / kT
        return cls(float(lam), float(gamma), beta, int(r))

    @property
    def kT(self):
        return 0.0 if math.isinf(self.beta) else (math.inf if self.beta == 0 else 1.0 / self.beta)

    @property
    def zero_temperature(self):
        return math.isinf(self.beta)

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class CorrelatorSet:
    """``<sz>`` and the two-point functions ``<s^a_0 s^a_r>`` at one separation."""

    mz: float
    xx: float
    yy: float
    zz: float


def dispersion(phi, p):
    """Quasi-particle dispersion ``omega_phi`` (array-friendly in ``phi``)."""
    phi = np.asarray(phi, dtype=float)
    return 0.5 * np.hypot(p.gamma * p.lam * np.sin(phi), 1.0 + p.lam * np.cos(phi))


def _weight_from_omega(w, p):
    """``tanh(beta omega) / (2 pi omega)`` with both temperature limits exact."""
    if p.zero_temperature:
        with np.errstate(divide="ignore"):
            return 1.0 / (2 * np.pi * w)
    if p.beta == 0:
        return np.zeros_like(w)
    safe = np.where(w > 0, w, 1.0)
    return np.where(w > 0, np.tanh(p.beta * safe) / (2 * np.pi * safe), p.beta / (2 * np.pi))


def _breakpoints(p):
    """Initial partition in ``psi = pi - phi``, where the critical-line endpoint sits at 0."""
    pts = {0.0, math.pi, ENDPOINT_SPLIT}
    if abs(p.lam - 1.0) < 0.1:
        # geometric refinement toward the removable 0/0 at the critical line
        for k in range(1, 20):
            pts.add(ENDPOINT_SPLIT * 0.5 ** k)
    if p.lam > 1.0:
        # minimum of omega; sharp when gamma is small
        pts.add(math.acos(1.0 / p.lam))
    return sorted(pts)


class GTable:
    """Magnetisation and ``G_r`` for ``|r| <= rmax`` from one batched integral.

    Instances are per-evaluation caches: building one integrates everything a
    Toeplitz determinant of order ``rmax`` needs.
    """

    def __init__(self, p, rmax=None, tol=QUAD_TOL):
        rmax = p.r if rmax is None else int(rmax)
        if rmax > MAX_SEPARATION:
            raise DomainError(f"separation {rmax} exceeds the cap of {MAX_SEPARATION}")
        self.params = p
        self.rmax = rmax
        rs = np.arange(-rmax, rmax + 1)
        if p.beta == 0:
            self.mz = 0.0
            self._g = np.zeros(rs.size)
            self.error = 0.0
            return
        gl = p.gamma * p.lam
        parity = np.where(rs % 2 == 0, 1.0, -1.0)[:, None]

        # Integrate in psi = pi - phi: cos(r phi) = (-1)^r cos(r psi),
        # sin(r phi) = -(-1)^r sin(r psi), and 1 + lam cos(phi) is written as
        # (1 - lam) + 2 lam sin^2(psi/2) to avoid cancellation near phi = pi.
        def integrand(psi):
            c = (1.0 - p.lam) + 2.0 * p.lam * np.sin(0.5 * psi) ** 2
            sp = np.sin(psi)
            wt = _weight_from_omega(0.5 * np.hypot(gl * sp, c), p)
            rp = np.outer(rs, psi)
            g = parity * wt * (np.cos(rp) * c + gl * np.sin(rp) * sp)
            return np.vstack([wt * c, g])

        vals, err = integrate(integrand, _breakpoints(p), tol=tol)
        self.mz = MZ_SIGN * float(vals[0])
        self._g = vals[1:]
        self.error = err

    def g(self, r):
        r = int(r)
        if abs(r) > self.rmax:
            raise DomainError(f"G_{r} not tabulated (rmax={self.rmax})")
        return float(self._g[r + self.rmax])

    def toeplitz(self, r, shift):
        """``r x r`` matrix with entries ``G_{i - j + shift}``."""
        idx = np.subtract.outer(np.arange(r), np.arange(r)) + shift
        return self._g[idx + self.rmax]

    def correlators(self, r=None):
        r = self.params.r if r is None else int(r)
        if r < 1 or r > self.rmax:
            raise DomainError(f"separation {r} outside 1..{self.rmax}")
        xx = float(np.linalg.det(self.toeplitz(r, -1)))
        yy = float(np.linalg.det(self.toeplitz(r, +1)))
        zz = self.mz ** 2 - self.g(r) * self.g(-r)
        return CorrelatorSet(self.mz, xx, yy, zz)


def transverse_magnetization(p):
    """Transverse magnetisation ``<sz>``."""
    return GTable(p, rmax=0).mz


def g_function(r, p):
    """Contraction function ``G_r`` for any integer ``r``."""
    return GTable(p, rmax=abs(int(r))).g(r)


def correlators(p):
    """``CorrelatorSet`` at the separation ``p.r``."""
    return GTable(p).correlators()


def x_state_from_correlators(c):
    """Two-spin X-shaped reduced density matrix from magnetisation and correlators."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.25 + c.mz / 2 + c.zz / 4
    rho[1, 1] = rho[2, 2] = (1 - c.zz) / 4
    rho[3, 3] = 0.25 - c.mz / 2 + c.zz / 4
    rho[0, 3] = rho[3, 0] = (c.xx - c.yy) / 4
    rho[1, 2] = rho[2, 1] = (c.xx + c.yy) / 4
    return rho


def two_spin_state(p, table=None):
    """Reduced density matrix of spins ``0`` and ``r`` (validated)."""
    c = (table or GTable(p)).correlators(p.r)
    rho = x_state_from_correlators(c)
    try:
        validate_state(rho)
    except InvalidStateError as exc:
        raise InvalidStateError(f"two-spin state invalid at {p}: {exc}") from exc
    return rho


def single_spin_state(p, table=None):
    """Single-spin reduced density matrix ``diag((1 + mz)/2, (1 - mz)/2)``."""
    mz = (table or GTable(p, rmax=0)).mz
    return np.diag([(1 + mz) / 2, (1 - mz) / 2]).astype(complex)


def factorization_field(gamma):
    """Field ``1 / sqrt(1 - gamma^2)`` at which the ground state is a product state."""
    if not (0.0 <= gamma < 1.0):
        raise DomainError(f"factorization field is finite only for 0 <= gamma < 1, got {gamma}")
    return 1.0 / math.sqrt(1.0 - gamma * gamma)
