import math

import numpy as np
import pytest

from oracles import direct_partition_sum, quadrature_cos_power_element
from rotorkick.basis import ALIGNMENT, ORIENTATION, block_decomposition, build_basis
from rotorkick.operators import (
    DensityMatrix,
    HermitianOperator,
    cos2_theta_matrix,
    cos_theta_matrix,
    embed_density,
    embed_operator,
    eigenvalue_multiplicities,
    h0_matrix,
    hermitian_function,
    kick_unitary,
    thermal_state,
)


def test_h0_diagonal_entries():
    basis = build_basis(1)
    h0 = h0_matrix(basis)
    assert np.allclose(np.diag(h0.matrix).real, [2.0, 0.0, 2.0, 2.0])
    assert np.all(h0.matrix == np.diag(np.diag(h0.matrix)))
    b2 = build_basis(2)
    assert h0_matrix(b2).matrix[b2.index_of(2, 0), b2.index_of(2, 0)] == 6.0


def test_cos_theta_reference_elements():
    basis = build_basis(4)
    c = cos_theta_matrix(basis)
    assert c.matrix[basis.index_of(1, 0), basis.index_of(0, 0)].real == pytest.approx(
        1 / math.sqrt(3), abs=1e-15
    )
    # top coupling in the m = j_max - 1 two-level block
    for j_max in range(2, 11):
        b = build_basis(j_max)
        cc = cos_theta_matrix(b)
        got = cc.matrix[b.index_of(j_max, j_max - 1), b.index_of(j_max - 1, j_max - 1)].real
        assert got == pytest.approx(1 / math.sqrt(2 * j_max + 1), abs=1e-15)
    # the 1x1 block at m = j_max carries no element
    top = basis.index_of(4, 4)
    assert np.all(c.matrix[top] == 0)


def test_cos_theta_against_quadrature():
    basis = build_basis(4)
    c = cos_theta_matrix(basis)
    for a, sa in enumerate(basis.states):
        for b, sb in enumerate(basis.states):
            if sa.m != sb.m:
                continue
            expected = quadrature_cos_power_element(sa.j, sb.j, sa.m, 1)
            assert c.matrix[a, b].real == pytest.approx(expected, abs=1e-12)


def test_cos2_reference_elements():
    basis = build_basis(2)
    c2 = cos2_theta_matrix(basis)
    i00 = basis.index_of(0, 0)
    assert c2.matrix[i00, i00].real == pytest.approx(1 / 3, abs=1e-15)
    assert c2.matrix[basis.index_of(2, 0), i00].real == pytest.approx(2 / (3 * math.sqrt(5)), abs=1e-15)
    b1 = build_basis(1)
    assert np.trace(cos2_theta_matrix(b1).matrix).real == pytest.approx(4 / 3, abs=1e-14)


def test_cos2_against_quadrature():
    basis = build_basis(4)
    c2 = cos2_theta_matrix(basis)
    for a, sa in enumerate(basis.states):
        for b, sb in enumerate(basis.states):
            if sa.m != sb.m:
                continue
            expected = quadrature_cos_power_element(sa.j, sb.j, sa.m, 2)
            assert c2.matrix[a, b].real == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("j_max", [1, 3, 6])
def test_block_structure_exact_zeros(j_max):
    basis = build_basis(j_max)
    c = cos_theta_matrix(basis)
    c2 = cos2_theta_matrix(basis)
    off_o = block_decomposition(basis, ORIENTATION).coupling_mask(basis.dim)
    off_a = block_decomposition(basis, ALIGNMENT).coupling_mask(basis.dim)
    assert np.all(c.matrix[off_o] == 0)
    assert np.all(c2.matrix[off_a] == 0)
    # cos couples only neighboring j, cos^2 only j and j +- 2
    for a, sa in enumerate(basis.states):
        for b, sb in enumerate(basis.states):
            if c.matrix[a, b] != 0:
                assert abs(sa.j - sb.j) == 1 and sa.m == sb.m
            if c2.matrix[a, b] != 0:
                assert abs(sa.j - sb.j) in (0, 2) and sa.m == sb.m


@pytest.mark.parametrize("j_max", [1, 2, 4])
def test_cos2_projection_consistency(j_max):
    small = build_basis(j_max)
    large = build_basis(j_max + 3)
    c_small = cos2_theta_matrix(small).matrix
    c_large = cos2_theta_matrix(large).matrix
    idx = [large.index_of(s.j, s.m) for s in small.states]
    assert np.max(np.abs(c_small - c_large[np.ix_(idx, idx)])) < 1e-12


def test_thermal_zero_temperature_limit():
    basis = build_basis(3)
    rho = thermal_state(basis, beta=1e3).validate_spectrum()
    ground = basis.index_of(0, 0)
    assert rho.matrix[ground, ground].real == pytest.approx(1.0, abs=1e-12)
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_thermal_infinite_temperature_truncated():
    basis = build_basis(2)
    rho = thermal_state(basis, beta=1e-12, z_mode="truncated")
    assert np.allclose(np.diag(rho.matrix).real, 1 / basis.dim, atol=1e-12)


def test_thermal_licl_against_direct_sum():
    beta = 0.70652 / (0.6950348 * 5.0)
    basis = build_basis(8)
    rho = thermal_state(basis, beta)
    z = direct_partition_sum(beta)
    assert rho.matrix[basis.index_of(0, 0), basis.index_of(0, 0)].real == pytest.approx(1 / z, rel=1e-12)
    # trace deficit equals the population excluded by the cutoff
    excluded = sum(
        (2 * j + 1) * math.exp(-beta * j * (j + 1)) for j in range(9, 200)
    ) / z
    assert np.trace(rho.matrix).real == pytest.approx(1.0 - excluded, abs=1e-12)


def test_thermal_weight_ordering():
    basis = build_basis(5)
    rho = thermal_state(basis, beta=0.3)
    diag = np.diag(rho.matrix).real
    weights_by_jm = {(s.j, s.m): diag[k] for k, s in enumerate(basis.states)}
    for (j, m), w in weights_by_jm.items():
        if (j + 1, m) in weights_by_jm:
            assert weights_by_jm[(j + 1, m)] <= w
        if (j, m - 1) in weights_by_jm:
            assert weights_by_jm[(j, m - 1)] == pytest.approx(w, abs=1e-16)


def test_thermal_modes_and_renormalize():
    basis = build_basis(2)
    beta = 0.4
    full = thermal_state(basis, beta, z_mode="full")
    trunc = thermal_state(basis, beta, z_mode="truncated")
    renorm = thermal_state(basis, beta, z_mode="full", renormalize=True)
    assert np.trace(full.matrix).real < 1.0
    assert np.trace(trunc.matrix).real == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(renorm.matrix - trunc.matrix)) < 1e-14


def test_thermal_invalid_beta():
    basis = build_basis(1)
    with pytest.raises(ValueError):
        thermal_state(basis, beta=0.0)
    with pytest.raises(ValueError):
        thermal_state(basis, beta=-1.0)
    with pytest.raises(ValueError):
        thermal_state(basis, beta=1.0, z_mode="bogus")


def test_hermitian_function_identity_and_zero():
    basis = build_basis(2)
    c = cos_theta_matrix(basis)
    assert np.max(np.abs(hermitian_function(c, lambda w: w) - c.matrix)) < 1e-12
    u0 = kick_unitary(c, 0.0)
    assert np.max(np.abs(u0 - np.eye(basis.dim))) < 1e-12


def test_kick_exponential_two_level_closed_form():
    # on the 2x2 m=0 block of j_max=1 with off-diagonal c:
    # exp(iA C) = cos(Ac) I + i sin(Ac)/c * C, eigenvalues +-c
    basis = build_basis(1)
    cmat = cos_theta_matrix(basis)
    c = 1 / math.sqrt(3)
    for amp in (0.5, 1.0, 2.0):
        u = kick_unitary(cmat, amp)
        idx = [basis.index_of(0, 0), basis.index_of(1, 0)]
        block = u[np.ix_(idx, idx)]
        expected = math.cos(amp * c) * np.eye(2) + 1j * math.sin(amp * c) / c * cmat.matrix[np.ix_(idx, idx)]
        assert np.max(np.abs(block - expected)) < 1e-12
        # the 1x1 blocks at m = +-1 see eigenvalue 0
        for m in (-1, 1):
            k = basis.index_of(1, m)
            assert u[k, k] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("amp", [0.5, 1.0, 2.0, 5.0])
def test_kick_unitary_and_commuting(amp):
    basis = build_basis(4)
    c = cos_theta_matrix(basis)
    u = kick_unitary(c, amp)
    assert np.max(np.abs(u.conj().T @ u - np.eye(basis.dim))) < 1e-10
    assert np.max(np.abs(c.matrix @ u - u @ c.matrix)) < 1e-12


def test_spectrum_preserved_under_conjugation():
    basis = build_basis(3)
    rho = thermal_state(basis, beta=0.25)
    u = kick_unitary(cos_theta_matrix(basis), 2.0)
    conj = DensityMatrix(basis, u @ rho.matrix @ u.conj().T, trace_target=float(np.trace(rho.matrix).real))
    assert np.max(np.abs(conj.eigenvalues - rho.eigenvalues)) < 1e-10


def test_hermitian_operator_validation():
    basis = build_basis(1)
    bad = np.zeros((4, 4), dtype=complex)
    bad[0, 1] = 1.0  # not Hermitian
    with pytest.raises(ValueError):
        HermitianOperator(basis, bad)
    good = np.eye(4)
    with pytest.raises(ValueError):
        HermitianOperator(build_basis(2), good)  # wrong size
    coupling = np.zeros((4, 4))
    coupling[0, 1] = coupling[1, 0] = 0.5  # couples m=-1 to m=0
    with pytest.raises(ValueError):
        HermitianOperator(basis, coupling, blocks=block_decomposition(basis, ORIENTATION))


def test_density_matrix_validation():
    basis = build_basis(1)
    mat = np.eye(4) / 4
    rho = DensityMatrix(basis, mat)
    assert rho.purity() == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(ValueError):
        DensityMatrix(basis, np.eye(4))  # trace 4 vs declared 1
    neg = np.diag([0.6, 0.5, -0.05, -0.05]).astype(complex)
    with pytest.raises(ValueError):
        DensityMatrix(basis, neg).validate_spectrum()


def test_embedding_roundtrip():
    small = build_basis(2)
    big = build_basis(4)
    rho = thermal_state(small, beta=0.7)
    lifted = embed_density(rho, big)
    assert np.trace(lifted.matrix).real == pytest.approx(np.trace(rho.matrix).real, abs=1e-14)
    idx = [big.index_of(s.j, s.m) for s in small.states]
    assert np.max(np.abs(lifted.matrix[np.ix_(idx, idx)] - rho.matrix)) == 0.0
    c_small = cos_theta_matrix(small)
    lifted_op = embed_operator(c_small, big)
    assert np.max(np.abs(lifted_op.matrix[np.ix_(idx, idx)] - c_small.matrix)) == 0.0
    outside = [k for k in range(big.dim) if k not in idx]
    assert np.all(lifted_op.matrix[outside, :] == 0)


def test_eigenvalue_multiplicities():
    basis = build_basis(1)
    c = cos_theta_matrix(basis)
    assert eigenvalue_multiplicities(c) == [1, 2, 1]
    ident = HermitianOperator(basis, np.eye(4))
    assert eigenvalue_multiplicities(ident) == [4]
