"""Finite-chain exact diagonalisation of the periodic XY chain.

Serves as the independent reference for the closed-form solver in
:mod:`xycorr.xy`. The Hamiltonian is real in the computational basis and
commutes with the parity ``P = prod_j sz_j``, so every diagonalisation is
done sector by sector (two blocks of size ``2^(N-1)``).

Site ``0`` is the leftmost tensor factor, i.e. the most significant bit of a
basis index; bit value ``0`` is the ``sz = +1`` state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ShapeError
from .linalg import PAULIS, check_hermitian, partial_trace

MAX_SPINS = 12
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class ChainSpec:
    n_spins: int
    lam: float
    gamma: float

    def __post_init__(self):
        if not (2 <= self.n_spins <= MAX_SPINS):
            raise CapacityError(f"n_spins must lie in [2, {MAX_SPINS}], got {self.n_spins}")


def _spins(n):
    """``(2^n, n)`` array of sz eigenvalues (+1 for bit 0) per basis state and site."""
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    return 1 - 2 * bits


def parity_diagonal(n):
    """Diagonal of ``prod_j sz_j``."""
    return np.prod(_spins(n), axis=1)


def build_hamiltonian(c):
    """Dense real Hamiltonian of the periodic chain."""
    n = c.n_spins
    dim = 2 ** n
    s = _spins(n)
    H = np.zeros((dim, dim))
    H[np.arange(dim), np.arange(dim)] = -s.sum(axis=1)
    idx = np.arange(dim)
    for j in range(n):
        k = (j + 1) % n
        flipped = idx ^ (1 << (n - 1 - j)) ^ (1 << (n - 1 - k))
        # (1+g) sx sx + (1-g) sy sy flips both spins with amplitude
        # 2g when they are aligned and 2 when anti-aligned
        amp = np.where(s[:, j] == s[:, k], 2 * c.gamma, 2.0)
        np.add.at(H, (flipped, idx), -0.5 * c.lam * amp)
    return H


@dataclass
class Eigensystem:
    """Parity-resolved eigenpairs. ``vectors[:, k]`` lives in the full space."""

    energies: np.ndarray
    parities: np.ndarray
    vectors: np.ndarray


def diagonalize(H):
    """Eigenpairs of ``H`` sorted by energy, split by parity when ``[H, P] = 0``."""
    H = check_hermitian(np.asarray(H))
    dim = H.shape[0]
    n = int(round(math.log2(dim)))
    if 2 ** n != dim:
        w, v = np.linalg.eigh(H)
        return Eigensystem(w, np.zeros(dim, dtype=int), v)
    par = parity_diagonal(n)
    if np.max(np.abs(H[np.ix_(par > 0, par < 0)])) > 1e-12:
        w, v = np.linalg.eigh(H)
        return Eigensystem(w, np.zeros(dim, dtype=int), v)
    energies, parities, vectors = [], [], np.zeros((dim, dim), dtype=H.dtype)
    col = 0
    for sign in (1, -1):
        sel = np.flatnonzero(par == sign)
        w, v = np.linalg.eigh(H[np.ix_(sel, sel)])
        energies.append(w)
        parities.append(np.full(w.size, sign))
        vectors[sel, col:col + w.size] = v
        col += w.size
    e = np.concatenate(energies)
    order = np.argsort(e, kind="stable")
    return Eigensystem(e[order], np.concatenate(parities)[order], vectors[:, order])


def gibbs_weights(energies, beta):
    """Normalised Boltzmann weights; ``beta = inf`` spreads evenly over the ground level."""
    e = np.asarray(energies) - np.min(energies)
    if math.isinf(beta):
        w = (e < DEGENERACY_TOL).astype(float)
    else:
        w = np.exp(-beta * e)
    return w / w.sum()


def thermal_state(H, beta, eig=None):
    """Gibbs state ``exp(-beta H) / Z``; ``beta = inf`` gives the thermal ground state."""
    eig = diagonalize(H) if eig is None else eig
    p = gibbs_weights(eig.energies, beta)
    keep = p > 0
    v = eig.vectors[:, keep]
    return (v * p[keep]) @ v.conj().T


def xy_thermal_state(c, beta):
    """Gibbs state at the temperature convention of :mod:`xycorr.xy`.

    The closed-form integrals at inverse temperature ``beta`` correspond to
    ``exp(-beta H / 2)`` for the Hamiltonian built here.
    """
    return thermal_state(build_hamiltonian(c), 0.5 * beta)


def reduced_two_spin(rho, i, j):
    """Two-spin reduced density matrix of sites ``i`` and ``j``."""
    n = int(round(math.log2(rho.shape[0])))
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ShapeError(f"invalid site pair ({i}, {j}) for {n} spins")
    return partial_trace(rho, (i, j), [2] * n)


def state_correlators(rho2):
    """``(mz, xx, yy, zz)`` of a two-spin state, with ``mz`` on the first spin."""
    sx, sy, sz = PAULIS
    I = np.eye(2)
    ev = lambda op: float(np.trace(rho2 @ op).real)
    return ev(np.kron(sz, I)), ev(np.kron(sx, sx)), ev(np.kron(sy, sy)), ev(np.kron(sz, sz))


@dataclass
class ParitySpectrum:
    energies: np.ndarray
    parities: np.ndarray

    @property
    def levels(self):
        return list(zip(self.energies.tolist(), self.parities.tolist()))

    @property
    def ground_gap(self):
        return float(self.energies[1] - self.energies[0])


def parity_spectrum(c):
    """Full spectrum with a parity label on every level."""
    eig = diagonalize(build_hamiltonian(c))
    return ParitySpectrum(eig.energies, eig.parities)


def sector_ground_energies(c):
    """Lowest energy in the even (P = +1) and odd (P = -1) sectors."""
    H = build_hamiltonian(c)
    par = parity_diagonal(c.n_spins)
    out = []
    for sign in (1, -1):
        sel = np.flatnonzero(par == sign)
        out.append(float(np.linalg.eigvalsh(H[np.ix_(sel, sel)])[0]))
    return tuple(out)


def parity_crossings(n_spins, gamma, lams):
    """Fields in ``lams`` intervals where the even and odd sector ground levels cross.

    Each crossing is refined by bisection on the sector-energy difference and
    returned as ``(lam, parity_below, parity_above)`` where the parities label
    the ground level just below and just above the crossing.
    """
    from scipy.optimize import brentq

    def diff(lam):
        e, o = sector_ground_energies(ChainSpec(n_spins, lam, gamma))
        return e - o

    lams = np.asarray(lams, dtype=float)
    d = np.array([diff(l) for l in lams])
    out = []
    for a, b, da, db in zip(lams[:-1], lams[1:], d[:-1], d[1:]):
        if da == 0.0:
            root = a
        elif da * db < 0:
            root = brentq(diff, a, b, xtol=1e-12)
        else:
            continue
        below = 1 if da < 0 else -1
        out.append((float(root), below, -below))
    return out


def thermal_reduced_two_spin(eig, beta, i, j):
    """Two-spin reduced Gibbs state straight from eigenpairs.

    Equivalent to ``reduced_two_spin(thermal_state(H, beta), i, j)`` without
    forming the full ``2^N x 2^N`` density matrix.
    """
    dim = eig.vectors.shape[0]
    n = int(round(math.log2(dim)))
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ShapeError(f"invalid site pair ({i}, {j}) for {n} spins")
    p = gibbs_weights(eig.energies, beta)
    keep = p > 0
    v = eig.vectors[:, keep].reshape([2] * n + [int(keep.sum())])
    rest = [k for k in range(n) if k not in (i, j)]
    v = v.transpose([i, j] + rest + [n]).reshape(4, dim // 4, -1)
    return np.einsum("amk,bmk,k->ab", v, v.conj(), p[keep])
