"""Correlation, coherence and uncertainty measures on one- and two-qubit states.

Every measure returns a :class:`MeasureResult`. The reported ``value`` is
clamped at zero; the unclamped number is kept in ``raw`` so that round-off of
order -1e-12 stays visible without breaking ``value >= 0`` checks downstream.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .linalg import (
    BASIS_OPS,
    IDENTITY2,
    PAULI_LABELS,
    PAULIS,
    SIGMA_Y,
    bloch_decompose,
    check_hermitian,
    is_x_state,
    matrix_sqrt_psd,
    partial_trace,
    validate_state,
    von_neumann_entropy,
)
from .errors import ShapeError

GRID_POLAR = 24
GRID_AZIMUTH = 48


@dataclass
class MeasureResult:
    value: float
    raw: float
    metadata: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def _result(raw, **meta):
    raw = float(raw)
    return MeasureResult(max(raw, 0.0), raw, meta)


def _two_qubit(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ShapeError(f"expected a two-qubit (4x4) state, got {rho.shape}")
    validate_state(rho)
    return rho


def observable(k):
    """Coerce ``k`` into a 2x2 Hermitian observable.

    Accepts a Pauli label (``"x"``, ``"y"``, ``"z"``), a real 3-vector (the
    unit axis ``n`` of ``n . sigma``, normalised here) or a Hermitian matrix.
    """
    if isinstance(k, str):
        label = k.lower().replace("sigma", "").strip("_")
        if label not in PAULI_LABELS:
            raise ValueError(f"unknown Pauli label {k!r}")
        return PAULIS[PAULI_LABELS.index(label)]
    k = np.asarray(k)
    if k.shape == (3,):
        n = k.astype(float) / np.linalg.norm(k)
        return sum(c * s for c, s in zip(n, PAULIS))
    return check_hermitian(k.astype(complex))


def _lift(rho, K, local):
    K = observable(K)
    if local:
        d = rho.shape[0] // K.shape[0]
        K = np.kron(K, np.eye(d))
    if K.shape != rho.shape:
        raise ShapeError(f"observable shape {K.shape} does not match state {rho.shape}")
    return K


def sphere_grid(n_polar=GRID_POLAR, n_azimuth=GRID_AZIMUTH):
    """Unit vectors on a polar x azimuth grid containing the three coordinate axes."""
    th = np.arange(n_polar) * np.pi / n_polar
    ph = np.arange(n_azimuth) * 2 * np.pi / n_azimuth
    T, P = np.meshgrid(th, ph, indexing="ij")
    return np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)


# --- entropic measures -------------------------------------------------------

def mutual_information(rho):
    """Quantum mutual information ``S(a) + S(b) - S(ab)`` in bits."""
    rho = _two_qubit(rho)
    ra = partial_trace(rho, 0, (2, 2))
    rb = partial_trace(rho, 1, (2, 2))
    return _result(von_neumann_entropy(ra) + von_neumann_entropy(rb) - von_neumann_entropy(rho))


def _eig2(m):
    """Eigenvalues of a stack of 2x2 Hermitian matrices, shape (..., 2)."""
    a = m[..., 0, 0].real
    d = m[..., 1, 1].real
    b = np.abs(m[..., 0, 1])
    rad = np.sqrt(0.25 * (a - d) ** 2 + b * b)
    mid = 0.5 * (a + d)
    return np.stack([mid + rad, mid - rad], axis=-1)


def _h2(lam):
    lam = np.clip(lam, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(lam > 0, -lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0)
    return t.sum(axis=-1)


def conditional_entropy(rho, axes, side="b"):
    """Average entropy of the unmeasured qubit after projective measurements.

    ``axes`` is an ``(M, 3)`` array of measurement directions on ``side``.
    Returns an array of length ``M``.
    """
    axes = np.atleast_2d(np.asarray(axes, dtype=float))
    axes = axes / np.linalg.norm(axes, axis=1, keepdims=True)
    ns = np.einsum("mi,ijk->mjk", axes, np.array(PAULIS))
    R = rho.reshape(2, 2, 2, 2)
    total = np.zeros(axes.shape[0])
    for sign in (1.0, -1.0):
        proj = 0.5 * (IDENTITY2[None] + sign * ns)
        if side == "b":
            sub = np.einsum("abcd,mdb->mac", R, proj)
        else:
            sub = np.einsum("abcd,mca->mbd", R, proj)
        p = np.trace(sub, axis1=1, axis2=2).real
        lam = _eig2(sub)  # unnormalised eigenvalues, sum to p
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(p > 1e-15, _h2(lam / np.where(p > 1e-15, p, 1.0)[:, None]), 0.0)
        total += p * s
    return total


def _angles_to_axis(v):
    th, ph = v
    return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def classical_correlations(rho, side="b"):
    """Classical correlations maximised over projective measurements on ``side``.

    A deterministic 24 x 48 grid over the measurement axis seeds a
    Nelder-Mead refinement of the conditional entropy.
    """
    rho = _two_qubit(rho)
    kept = 0 if side == "b" else 1
    s_kept = von_neumann_entropy(partial_trace(rho, kept, (2, 2)))
    grid = sphere_grid()
    ce = conditional_entropy(rho, grid, side)
    best = int(np.argmin(ce))
    n0 = grid[best]
    x0 = np.array([np.arccos(np.clip(n0[2], -1, 1)), np.arctan2(n0[1], n0[0])])
    res = minimize(
        lambda v: conditional_entropy(rho, _angles_to_axis(v)[None], side)[0],
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000},
    )
    if res.fun <= ce[best]:
        smin, axis = float(res.fun), _angles_to_axis(res.x)
    else:
        smin, axis = float(ce[best]), n0
    return _result(s_kept - smin, side=side, axis=axis, conditional_entropy=smin)


def quantum_discord(rho, side="b"):
    """Quantum discord: mutual information minus classical correlations."""
    mi = mutual_information(rho)
    cc = classical_correlations(rho, side)
    return _result(mi.raw - cc.raw, side=side, axis=cc.metadata["axis"],
                   mutual_information=mi.raw, classical=cc.raw)


# --- geometric measures ------------------------------------------------------

def _s_invariants(b):
    S = np.outer(b.x, b.x) + b.T @ b.T.T
    s1 = float(np.trace(S))
    s2 = float(np.trace(S @ S))
    s3 = float(np.trace(S @ S @ S))
    return S, s1, s2, s3


def gmqd(rho):
    """Geometric discord from the closed-form largest eigenvalue of ``S = x x^t + T T^t``."""
    b = bloch_decompose(_two_qubit(rho))
    _, s1, s2, s3 = _s_invariants(b)
    rad = 6 * s2 - 2 * s1 * s1
    if rad < 1e-14:
        k = np.full(3, s1 / 3)
        theta = 0.0
    else:
        arg = (2 * s1 ** 3 - 9 * s1 * s2 + 9 * s3) * np.sqrt(2.0 / (3 * s2 - s1 * s1) ** 3)
        theta = float(np.arccos(np.clip(arg, -1.0, 1.0)))
        alphas = np.array([0.0, 2 * np.pi, 4 * np.pi])
        k = s1 / 3 + np.sqrt(rad) / 3 * np.cos((theta + alphas) / 3)
    return _result(2 * (s1 - k.max()), k=k, theta=theta)


def omqc(rho):
    """Optimisation-free lower bound on the geometric discord."""
    b = bloch_decompose(_two_qubit(rho))
    _, s1, s2, _ = _s_invariants(b)
    rad = 6 * s2 - 2 * s1 * s1
    if rad < 0:
        if rad < -1e-12:
            raise ArithmeticError(f"negative radicand {rad:.3e} in OMQC")
        rad = 0.0
    return _result(2.0 / 3.0 * (2 * s1 - np.sqrt(rad)))


def min_measure(rho):
    """Measurement-induced nonlocality with local measurements on the first qubit."""
    rho = _two_qubit(rho)
    b = bloch_decompose(rho)
    TT = b.T @ b.T.T
    nx = np.linalg.norm(b.x)
    if nx > 1e-9:
        xh = b.x / nx
        raw = 2 * (np.trace(TT) - xh @ TT @ xh)
    else:
        raw = 2 * (np.trace(TT) - np.linalg.eigvalsh(TT)[0])
    meta = {}
    if nx > 1e-9 and is_x_state(rho):
        meta["x_form"] = 4 * (abs(rho[1, 2]) ** 2 + abs(rho[0, 3]) ** 2)
    return _result(raw, **meta)


# --- skew information --------------------------------------------------------

def variance(rho, K, local=False):
    rho = np.asarray(rho, dtype=complex)
    K = _lift(rho, K, local)
    return float(np.trace(rho @ K @ K).real - np.trace(rho @ K).real ** 2)


def wysi(rho, K, local=False, sqrt_rho=None):
    """Wigner-Yanase skew information ``-1/2 Tr [sqrt(rho), K]^2``.

    With ``local=True`` the 2x2 observable acts on the first qubit as ``K (x) I``.
    """
    rho = np.asarray(rho, dtype=complex)
    K = _lift(rho, K, local)
    s = matrix_sqrt_psd(rho) if sqrt_rho is None else sqrt_rho
    c = s @ K - K @ s
    return _result(-0.5 * np.trace(c @ c).real)


def wysi_lower(rho, K, local=False):
    """Square-root-free lower bound ``-1/4 Tr [rho, K]^2``."""
    rho = np.asarray(rho, dtype=complex)
    validate_state(rho)
    K = _lift(rho, K, local)
    c = rho @ K - K @ rho
    return _result(-0.25 * np.trace(c @ c).real)


def _w_matrix(s):
    ops = [np.kron(p, IDENTITY2) for p in PAULIS]
    m = [s @ o for o in ops]
    W = np.array([[np.trace(m[i] @ m[j]).real for j in range(3)] for i in range(3)])
    return 0.5 * (W + W.T)


def lqu(rho, verify=False):
    """Local quantum uncertainty ``1 - lambda_max(W_AB)`` on the first qubit.

    ``metadata['axis']`` is the minimising observable direction and
    ``metadata['label']`` its dominant Pauli component. With ``verify=True`` the
    closed form is compared against a brute-force observable-axis grid and the
    grid minimum is stored under ``'grid_value'``.
    """
    rho = _two_qubit(rho)
    s = matrix_sqrt_psd(rho)
    W = _w_matrix(s)
    w, v = np.linalg.eigh(W)
    axis = v[:, -1] * np.sign(v[np.argmax(np.abs(v[:, -1])), -1])
    meta = {"axis": axis, "label": PAULI_LABELS[int(np.argmax(np.abs(axis)))], "W": W}
    if verify:
        grid = sphere_grid()
        # I(rho, n.sigma (x) I) = 1 - n^t W n for unit n
        vals = [wysi(rho, n, local=True, sqrt_rho=s).raw for n in grid]
        meta["grid_value"] = float(min(vals))
    return _result(1.0 - w[-1], **meta)


def wysim_total(rho, basis=None):
    """Skew-information total correlations ``2/3 (Q_a(rho_ab) - Q_a(rho_a))``.

    ``basis`` is an orthonormal family of 2x2 Hermitian observables on the
    first qubit; the default is ``sigma_i / sqrt(2)`` (the identity element of
    a full basis contributes nothing).
    """
    rho = _two_qubit(rho)
    ops = BASIS_OPS if basis is None else basis
    ra = partial_trace(rho, 0, (2, 2))
    s = matrix_sqrt_psd(rho)
    sa = matrix_sqrt_psd(ra)
    q_ab = sum(wysi(rho, X, local=True, sqrt_rho=s).raw for X in ops)
    q_a = sum(wysi(ra, X, sqrt_rho=sa).raw for X in ops)
    return _result(2.0 / 3.0 * (q_ab - q_a), q_ab=q_ab, q_a=q_a)


# --- entanglement ------------------------------------------------------------

def concurrence(rho):
    """Wootters concurrence.

    The square roots of the eigenvalues of ``rho rho~`` are taken as singular
    values of ``sqrt(rho) sqrt(rho~)``, which avoids square roots of round-off.
    """
    rho = _two_qubit(rho)
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    s = matrix_sqrt_psd(rho)
    s_tilde = yy @ s.conj() @ yy
    sv = np.linalg.svd(s @ s_tilde, compute_uv=False)
    raw = sv[0] - sv[1] - sv[2] - sv[3]
    meta = {"sqrt_eigenvalues": sv}
    if is_x_state(rho):
        d = rho.diagonal().real
        meta["x_form"] = 2 * max(0.0, abs(rho[0, 3]) - np.sqrt(max(d[1] * d[2], 0.0)),
                                 abs(rho[1, 2]) - np.sqrt(max(d[0] * d[3], 0.0)))
    return _result(raw, **meta)
