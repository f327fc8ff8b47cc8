import math

import numpy as np
import pytest

from thermalcert.errors import DimensionError
from thermalcert.pauli import PauliString, expand
from thermalcert.states import (
    DensityMatrix,
    PureState,
    basis_product_state,
    fidelity_pure,
    ghz_state,
    haar_random_pure,
    partial_trace,
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)


def random_density(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = a @ a.conj().T
    return DensityMatrix(m / m.trace().real)


def test_pure_state_validation():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        PureState.from_amplitudes(np.zeros(4))
    with pytest.raises(DimensionError):
        PureState(np.ones(3) / math.sqrt(3))
    s = PureState.from_amplitudes(np.array([3.0, 4.0, 0.0, 0.0]))
    assert abs(np.linalg.norm(s.vector) - 1.0) < 1e-14
    assert s.n_parties == 2


def test_density_matrix_validation():
    DensityMatrix(np.eye(4) / 4)
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4) / 2)
    bad = np.diag([1.2, -0.2, 0.0, 0.0])
    with pytest.raises(ValueError):
        DensityMatrix(bad)
    # slack below zero up to 1e-9 is accepted
    DensityMatrix(np.diag([1.0 + 5e-10, -5e-10, 0.0, 0.0]))


def test_partial_trace_of_product():
    rng = np.random.default_rng(0)
    r1 = random_density(rng, 2).matrix
    r2 = random_density(rng, 2).matrix
    joint = np.kron(r1, r2)
    assert np.allclose(partial_trace(joint, [0]), r1, atol=1e-12)
    assert np.allclose(partial_trace(joint, [1]), r2, atol=1e-12)
    assert np.allclose(partial_trace(joint, [0, 1]), joint, atol=1e-12)


def test_partial_trace_ghz_pairs():
    ghz = ghz_state(3).density_matrix()
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 0.5
    for pair in ([0, 1], [0, 2], [1, 2]):
        got = partial_trace(ghz, pair)
        assert isinstance(got, DensityMatrix)
        assert np.allclose(got.matrix, expected, atol=1e-12)


def test_partial_trace_agrees_with_coefficient_restriction():
    # reduced state assembled from the in-support Pauli coefficients
    rng = np.random.default_rng(1)
    rho = random_density(rng, 16).matrix
    coeffs = expand(rho)
    keep = (1, 3)
    dim_keep = 4
    rebuilt = np.zeros((dim_keep, dim_keep), dtype=complex)
    for p, c in coeffs.items():
        if not set(p.support) <= set(keep):
            continue
        sub = PauliString(bytes(p.letters[q] for q in keep))
        rebuilt += c * 4 * sub.to_matrix()
    assert np.allclose(partial_trace(rho, keep), rebuilt, atol=1e-10)


def test_partial_trace_errors():
    rho = np.eye(4) / 4
    with pytest.raises(ValueError):
        partial_trace(rho, [])
    with pytest.raises(ValueError):
        partial_trace(rho, [2])


def test_fidelity_examples():
    psi = haar_random_pure(3, seed=2)
    assert abs(fidelity_pure(psi.projector(), psi) - 1.0) < 1e-12
    assert abs(fidelity_pure(np.eye(8) / 8, psi) - 1.0 / 8.0) < 1e-12
    with pytest.raises(DimensionError):
        fidelity_pure(np.eye(4) / 4, psi)


def test_trace_distance_examples():
    rho = np.eye(8) / 8
    assert trace_distance(rho, rho) == 0.0
    a = basis_product_state(2, 0)
    b = basis_product_state(2, 3)
    assert abs(trace_distance(a, b) - 1.0) < 1e-12


def test_fuchs_van_de_graaf_direction():
    # D_tr^2 <= 1 - F against a pure target, with equality for pure pairs
    sigma = np.eye(2) / 2
    zero = basis_product_state(1, 0)
    assert trace_distance(sigma, zero) ** 2 <= 1.0 - fidelity_pure(sigma, zero) + 1e-12
    rng = np.random.default_rng(3)
    for _ in range(50):
        rho = random_density(rng, 8)
        psi = haar_random_pure(3, seed=rng)
        dtr = trace_distance(rho, psi)
        fid = fidelity_pure(rho, psi)
        assert dtr**2 <= 1.0 - fid + 1e-12
    a = haar_random_pure(3, seed=30)
    b = haar_random_pure(3, seed=31)
    dtr = trace_distance(a, b)
    fid = fidelity_pure(a.projector(), b)
    assert abs(dtr**2 - (1.0 - fid)) <= 1e-10


def test_entropy_values_and_concavity():
    psi = haar_random_pure(2, seed=4)
    assert abs(von_neumann_entropy(psi.projector())) < 1e-10
    assert abs(von_neumann_entropy(np.eye(8) / 8) - 3 * math.log(2)) < 1e-12
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = random_density(rng, 8).matrix
        b = random_density(rng, 8).matrix
        mixed = von_neumann_entropy((a + b) / 2)
        assert mixed >= 0.5 * von_neumann_entropy(a) + 0.5 * von_neumann_entropy(b) - 1e-10


def test_relative_entropy_basics():
    rng = np.random.default_rng(6)
    rho = random_density(rng, 8)
    assert abs(relative_entropy(rho, rho)) < 1e-8
    sigma = random_density(rng, 8)
    assert relative_entropy(rho, sigma) >= 0.0
    # against the maximally mixed state the divergence is the entropy deficit
    uniform = np.eye(8) / 8
    expected = 3 * math.log(2) - von_neumann_entropy(rho)
    assert abs(relative_entropy(rho, uniform) - expected) < 1e-8


def test_relative_entropy_support_violation():
    zero = basis_product_state(1, 0)
    one = basis_product_state(1, 1)
    assert relative_entropy(zero, one) == math.inf
    plus = PureState(np.array([1.0, 1.0]) / math.sqrt(2))
    assert relative_entropy(plus, zero) == math.inf
    # yet the reverse direction is finite when supports nest
    assert relative_entropy(zero, plus.projector() * 0.5 + np.eye(2) * 0.25) < math.inf


def test_relative_entropy_dominates_log_fidelity():
    rng = np.random.default_rng(7)
    for _ in range(30):
        sigma = random_density(rng, 8)
        psi = haar_random_pure(3, seed=rng)
        lhs = relative_entropy(psi, sigma)
        rhs = -math.log(fidelity_pure(sigma, psi))
        assert lhs >= rhs - 1e-9


def test_haar_determinism_and_norm():
    a = haar_random_pure(3, seed=42)
    b = haar_random_pure(3, seed=42)
    c = haar_random_pure(3, seed=43)
    assert np.array_equal(a.vector, b.vector)
    assert not np.array_equal(a.vector, c.vector)
    assert abs(np.linalg.norm(a.vector) - 1.0) < 1e-12


def test_haar_moments():
    # mean of <P> is 0 with variance 1/(D+1); mean fidelity to a fixed
    # state is 1/D with variance (D-1)/(D^2 (D+1))
    rng = np.random.default_rng(8)
    m = 10_000
    dim = 8
    pauli = PauliString.from_text("XYZ").to_matrix()
    fixed = haar_random_pure(3, seed=9)
    exp_sum = 0.0
    fid_sum = 0.0
    for _ in range(m):
        psi = haar_random_pure(3, seed=rng)
        exp_sum += float(np.real(psi.vector.conj() @ pauli @ psi.vector))
        fid_sum += fidelity_pure(psi.projector(), fixed)
    mean_exp = exp_sum / m
    mean_fid = fid_sum / m
    assert abs(mean_exp) <= 3.0 * math.sqrt(1.0 / (dim + 1) / m)
    fid_var = (dim - 1) / (dim**2 * (dim + 1))
    assert abs(mean_fid - 1.0 / dim) <= 3.0 * math.sqrt(fid_var / m)


def test_ghz_and_basis_states():
    ghz = ghz_state(4)
    assert abs(ghz.vector[0] - 1 / math.sqrt(2)) < 1e-14
    assert abs(ghz.vector[-1] - 1 / math.sqrt(2)) < 1e-14
    assert np.count_nonzero(ghz.vector) == 2
    e5 = basis_product_state(3, 5)
    assert e5.vector[5] == 1.0
    assert np.count_nonzero(e5.vector) == 1
