from functools import reduce

import numpy as np
import pytest

from xycorr import ed
from xycorr.errors import CapacityError, ShapeError
from xycorr.linalg import PAULIS, is_x_state


def _site_op(op, j, n):
    ops = [np.eye(2)] * n
    ops[j] = op
    return reduce(np.kron, ops)


def _kron_hamiltonian(n, lam, gamma):
    """Term-by-term tensor-product construction."""
    sx, sy, sz = PAULIS
    H = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for j in range(n):
        k = (j + 1) % n
        H -= lam / 2 * ((1 + gamma) * _site_op(sx, j, n) @ _site_op(sx, k, n)
                        + (1 - gamma) * _site_op(sy, j, n) @ _site_op(sy, k, n))
        H -= _site_op(sz, j, n)
    return H


def test_two_spins_zero_coupling():
    H = ed.build_hamiltonian(ed.ChainSpec(2, 0.0, 0.5))
    np.testing.assert_array_equal(H, np.diag([-2.0, 0, 0, 2]))


@pytest.mark.parametrize("n,lam,gamma", [(3, 1.0, 1.0), (4, 0.7, 0.3), (5, 1.3, 0.0)])
def test_matches_tensor_construction(n, lam, gamma):
    H = ed.build_hamiltonian(ed.ChainSpec(n, lam, gamma))
    np.testing.assert_allclose(H, _kron_hamiltonian(n, lam, gamma).real, atol=1e-14)
    assert np.all(_kron_hamiltonian(n, lam, gamma).imag == 0)


def test_parity_commutes():
    H = ed.build_hamiltonian(ed.ChainSpec(6, 0.9, 0.4))
    P = np.diag(ed.parity_diagonal(6))
    assert np.max(np.abs(H @ P - P @ H)) < 1e-12


def test_sector_spectrum_equals_full():
    c = ed.ChainSpec(8, 1.1, 0.6)
    spectrum = ed.parity_spectrum(c)
    full = np.linalg.eigvalsh(ed.build_hamiltonian(c))
    np.testing.assert_allclose(spectrum.energies, full, atol=1e-9)
    assert np.all(np.diff(spectrum.energies) >= 0)
    assert sorted(set(spectrum.parities.tolist())) == [-1, 1]
    assert (spectrum.parities == 1).sum() == (spectrum.parities == -1).sum() == 2 ** 7


def test_zero_coupling_ground_state():
    spectrum = ed.parity_spectrum(ed.ChainSpec(5, 0.0, 0.5))
    assert spectrum.levels[0] == (-5.0, 1)
    rho = ed.thermal_state(ed.build_hamiltonian(ed.ChainSpec(5, 0.0, 0.5)), np.inf)
    np.testing.assert_allclose(ed.reduced_two_spin(rho, 1, 3), np.diag([1.0, 0, 0, 0]), atol=1e-14)


def test_infinite_temperature():
    H = ed.build_hamiltonian(ed.ChainSpec(4, 1.0, 0.5))
    np.testing.assert_allclose(ed.thermal_state(H, 0.0), np.eye(16) / 16, atol=1e-15)


def test_nondegenerate_ground_state_is_pure():
    rho = ed.thermal_state(ed.build_hamiltonian(ed.ChainSpec(6, 0.5, 0.5)), np.inf)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 1
    assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-12)


def test_ordered_phase_quasi_degeneracy():
    # beyond the factorization field the lowest even and odd levels keep
    # crossing, so the finite-N splitting oscillates under an envelope that
    # closes with N; the bulk gap to the next level stays O(1)
    spectrum = ed.parity_spectrum(ed.ChainSpec(8, 1.5, 0.5))
    assert spectrum.levels[0][1] != spectrum.levels[1][1]
    assert spectrum.ground_gap < 0.05 * (spectrum.energies[2] - spectrum.energies[1])
    even, odd = ed.sector_ground_energies(ed.ChainSpec(12, 1.5, 0.5))
    assert abs(even - odd) < 1e-3


@pytest.mark.parametrize("beta", [0.3, 2.0, np.inf])
def test_thermal_state_symmetries(beta):
    c = ed.ChainSpec(6, 1.2, 0.7)
    rho = ed.thermal_state(ed.build_hamiltonian(c), beta)
    P = np.diag(ed.parity_diagonal(6))
    assert np.max(np.abs(rho @ P - P @ rho)) < 1e-10
    r01, r34 = ed.reduced_two_spin(rho, 0, 1), ed.reduced_two_spin(rho, 3, 4)
    np.testing.assert_allclose(r01, r34, atol=1e-10)
    assert is_x_state(r01)
    np.testing.assert_allclose(ed.reduced_two_spin(rho, 0, 2), ed.reduced_two_spin(rho, 5, 1), atol=1e-10)


def test_direct_reduction_matches_full_state():
    c = ed.ChainSpec(6, 0.8, 0.4)
    H = ed.build_hamiltonian(c)
    eig = ed.diagonalize(H)
    for beta in (0.7, np.inf):
        np.testing.assert_allclose(ed.thermal_reduced_two_spin(eig, beta, 0, 2),
                                   ed.reduced_two_spin(ed.thermal_state(H, beta, eig), 0, 2), atol=1e-13)


@pytest.mark.parametrize("lam", [0.5, 1.5])
def test_energy_extensivity(lam):
    e10 = min(ed.sector_ground_energies(ed.ChainSpec(10, lam, 1.0))) / 10
    e12 = min(ed.sector_ground_energies(ed.ChainSpec(12, lam, 1.0))) / 12
    assert abs(e10 - e12) < 5e-2


def test_parity_crossing_near_factorization_field():
    found = ed.parity_crossings(8, 0.5, np.linspace(1.05, 1.25, 11))
    assert len(found) >= 1
    lam, below, above = found[0]
    assert 1.05 <= lam <= 1.25 and below == -above


def test_capacity_and_site_errors():
    with pytest.raises(CapacityError):
        ed.ChainSpec(13, 1.0, 1.0)
    with pytest.raises(CapacityError):
        ed.ChainSpec(1, 1.0, 1.0)
    rho = ed.thermal_state(ed.build_hamiltonian(ed.ChainSpec(3, 1.0, 1.0)), 1.0)
    with pytest.raises(ShapeError):
        ed.reduced_two_spin(rho, 0, 3)
    with pytest.raises(ShapeError):
        ed.reduced_two_spin(rho, 1, 1)
