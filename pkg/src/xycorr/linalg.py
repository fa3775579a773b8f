"""Dense linear algebra and quantum-state utilities shared by every module.

All routines are pure functions on numpy arrays. Density matrices are
validated against a small negative-eigenvalue floor (``PSD_FLOOR``) because
quadrature round-off produces eigenvalues of order -1e-12 near the critical
line and at zero temperature.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidStateError, ShapeError, SymmetryError

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_FLOOR = 1e-10
# eigenvalues this small are indistinguishable from round-off; zeroed before sqrt
ZERO_EIG = 1e-14

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
PAULI_LABELS = ("x", "y", "z")

# orthonormal under the trace inner product, tr(X_i X_j) = delta_ij
BASIS_OPS = tuple(p / np.sqrt(2.0) for p in PAULIS)


def _square(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def check_hermitian(m, atol=HERMITIAN_ATOL):
    """Raise ``SymmetryError`` if ``m`` deviates from its adjoint by more than ``atol``."""
    m = _square(m)
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > atol:
        raise SymmetryError(f"matrix is not Hermitian: max |M - M^dagger| = {dev:.3e} > {atol:.1e}")
    return m


def hermitian_eig(m, atol=HERMITIAN_ATOL):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Square Hermitian matrix.
    atol : float
        Largest tolerated entry of ``m - m^dagger``.

    Returns
    -------
    w : ndarray
        Real eigenvalues in descending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors, so that
        ``m = v @ diag(w) @ v^dagger``.
    """
    m = check_hermitian(m, atol)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def validate_state(rho, trace_atol=TRACE_ATOL, floor=PSD_FLOOR):
    """Check that ``rho`` is a density matrix and return its eigenpairs.

    Eigenvalues in ``[-floor, 0)`` are clamped to zero in the returned
    spectrum; anything more negative raises ``InvalidStateError``.
    """
    rho = _square(rho)
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_atol:
        raise InvalidStateError(f"trace is {tr.real:.12g}, expected 1")
    w, v = hermitian_eig(rho)
    if w[-1] < -floor:
        raise InvalidStateError(f"negative eigenvalue {w[-1]:.3e} below floor -{floor:.0e}")
    return np.clip(w, 0.0, None), v


def matrix_sqrt_psd(rho):
    """Principal square root of a positive semidefinite density matrix."""
    w, v = validate_state(rho)
    w = np.where(w > ZERO_EIG, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def partial_trace(rho, keep, dims):
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    rho : array_like
        Density matrix on the tensor product of spaces with sizes ``dims``.
    keep : int or sequence of int
        Indices of the subsystems to keep, in the order they should appear.
    dims : sequence of int
        Factor dimensions; their product must equal ``rho.shape[0]``.
    """
    rho = _square(rho)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.shape[0]:
        raise ShapeError(f"dims {dims} do not multiply to {rho.shape[0]}")
    keep = [keep] if np.isscalar(keep) else list(keep)
    n = len(dims)
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ShapeError(f"invalid subsystem selection {keep} for {n} factors")
    traced = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[k] for k in keep]))
    dt = rho.shape[0] // dk
    order = keep + traced
    t = rho.reshape(dims + dims).transpose(order + [n + i for i in order])
    return np.einsum("aibi->ab", t.reshape(dk, dt, dk, dt))


def von_neumann_entropy(rho):
    """Von Neumann entropy in bits; ``0 log 0`` is taken as 0."""
    w, _ = validate_state(rho)
    w = w[w > 0]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def entropy_of_spectrum(p):
    """Shannon entropy in bits of a probability vector (zeros ignored)."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


class BlochDecomposition:
    """Local Bloch vectors and correlation matrix of a two-qubit state.

    Components are taken in the orthonormal basis ``X_i = sigma_i / sqrt(2)``
    so that ``rho = I/4 + sum_i x_i X_i (x) I/sqrt(2) + sum_j y_j I/sqrt(2) (x) X_j
    + sum_ij t_ij X_i (x) X_j``.
    """

    __slots__ = ("x", "y", "T")

    def __init__(self, x, y, T):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.T = np.asarray(T, dtype=float)

    def __repr__(self):
        return f"BlochDecomposition(x={self.x!r}, y={self.y!r}, T={self.T!r})"

    def to_matrix(self):
        """Reassemble the 4x4 density matrix."""
        s2 = np.sqrt(2.0)
        rho = np.eye(4, dtype=complex) / 4.0
        for i, X in enumerate(BASIS_OPS):
            rho += self.x[i] * np.kron(X, IDENTITY2 / s2)
            rho += self.y[i] * np.kron(IDENTITY2 / s2, X)
            for j, Y in enumerate(BASIS_OPS):
                rho += self.T[i, j] * np.kron(X, Y)
        return rho


def bloch_decompose(rho):
    """Split a two-qubit density matrix into ``x``, ``y`` and ``T``."""
    rho = _square(rho)
    if rho.shape != (4, 4):
        raise ShapeError(f"bloch_decompose needs a 4x4 matrix, got {rho.shape}")
    s2 = np.sqrt(2.0)
    x = np.array([np.trace(rho @ np.kron(X, IDENTITY2)).real / s2 for X in BASIS_OPS])
    y = np.array([np.trace(rho @ np.kron(IDENTITY2, Y)).real / s2 for Y in BASIS_OPS])
    T = np.array([[np.trace(rho @ np.kron(X, Y)).real for Y in BASIS_OPS] for X in BASIS_OPS])
    return BlochDecomposition(x, y, T)


def is_x_state(rho, atol=1e-10):
    """True when every entry off the diagonal and anti-diagonal vanishes."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        return False
    mask = np.ones((4, 4), dtype=bool)
    mask[np.arange(4), np.arange(4)] = False
    mask[np.arange(4), np.arange(3, -1, -1)] = False
    return bool(np.all(np.abs(rho[mask]) <= atol))


def random_state(rng, dim=4, rank=None):
    """Random density matrix from the induced (Ginibre) measure.

    ``rank`` defaults to full rank; ``rank=1`` gives a pure state.
    """
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim=2):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_x_state(rng):
    """Random valid two-qubit X state with complex anti-diagonal coherences."""
    p = rng.dirichlet(np.ones(4))
    a, b, c, d = p
    # |rho14|^2 <= a d and |rho23|^2 <= b c keep both 2x2 blocks PSD
    r14 = np.sqrt(a * d) * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    r23 = np.sqrt(b * c) * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    rho = np.diag([a, b, c, d]).astype(complex)
    rho[0, 3], rho[3, 0] = r14, np.conj(r14)
    rho[1, 2], rho[2, 1] = r23, np.conj(r23)
    return rho


def ket(*bits):
    """Computational basis ket ``|b1 b2 ...>`` with ``0`` the sigma_z = +1 state."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(str(b) for b in bits), 2)] = 1.0
    return v


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def bell_state():
    """Projector onto ``(|00> + |11>)/sqrt(2)``."""
    return projector(ket(0, 0) + ket(1, 1))


def werner_state(p):
    """``p |Phi+><Phi+| + (1 - p) I/4``."""
    return p * bell_state() + (1 - p) * np.eye(4) / 4
