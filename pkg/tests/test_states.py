import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import random_density, wootters_concurrence
from quncertainty.states import (
    X_BASIS,
    Y_BASIS,
    Z_BASIS,
    InvalidStateError,
    MeasurementBasis,
    NoiseModel,
    SchmidtParams,
    apply_white_noise,
    bell_state,
    bloch_basis,
    concurrence,
    fidelity_with_pure,
    linear_basis,
    purity,
    random_mixed_state,
    random_pure_state,
    random_separable_state,
    schmidt_ket,
    schmidt_state,
    tangle,
    uhlmann_fidelity,
    validate_density,
    zeta_for_tangle,
)

angles = st.floats(0, math.pi, allow_nan=False)
seeds = st.integers(0, 2**32 - 1)


def test_bell_state_entries():
    rho = bell_state()
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    np.testing.assert_allclose(rho, expected, atol=1e-15)
    assert tangle(rho) == pytest.approx(1.0, abs=1e-10)


@given(zeta=st.floats(0, math.pi / 2), theta=angles, phi=st.floats(0, 2 * math.pi))
def test_schmidt_tangle(zeta, theta, phi):
    params = SchmidtParams(zeta, theta, phi)
    rho = schmidt_state(params)
    validate_density(rho)
    assert tangle(rho) == pytest.approx(math.sin(2 * zeta) ** 2, abs=1e-8)
    assert params.tangle == pytest.approx(math.sin(2 * zeta) ** 2)


@given(tau=st.floats(0, 1))
def test_zeta_for_tangle_inverts(tau):
    zeta = zeta_for_tangle(tau)
    assert 0 <= zeta <= math.pi / 4 + 1e-15
    assert math.sin(2 * zeta) ** 2 == pytest.approx(tau, abs=1e-12)


@given(seed=seeds)
def test_concurrence_matches_wootters(seed):
    rho = random_density(np.random.default_rng(seed))
    assert concurrence(rho) == pytest.approx(wootters_concurrence(rho), abs=1e-7)


@given(seed=seeds)
def test_separable_states_have_zero_tangle(seed):
    rho = random_separable_state(np.random.default_rng(seed))
    validate_density(rho)
    assert tangle(rho) < 1e-12


@pytest.mark.parametrize(
    "rho, message",
    [
        (np.diag([0.5, 0.6]), "trace"),
        (np.array([[0.5, 0.1], [0.2, 0.5]]), "Hermitian"),
        (np.diag([1.2, -0.2]), "negative"),
        (np.eye(3) / 3, "2x2 or 4x4"),
    ],
)
def test_validate_density_rejects(rho, message):
    with pytest.raises(InvalidStateError, match=message):
        validate_density(rho)


@pytest.mark.parametrize("f", [0.25, 0.5, 0.97, 1.0])
def test_noise_fidelity_round_trip(f):
    model = NoiseModel.from_fidelity(f)
    assert model.mixing == pytest.approx((4 * f - 1) / 3)
    assert model.fidelity == pytest.approx(f)
    noisy = apply_white_noise(bell_state(), model)
    assert fidelity_with_pure(noisy, bell_state()) == pytest.approx(f)


@pytest.mark.parametrize("f", [0.2, 1.01])
def test_noise_out_of_range(f):
    with pytest.raises(ValueError):
        NoiseModel.from_fidelity(f)


def test_white_noise_kills_entanglement_below_half():
    # Werner states are separable for F <= 1/2
    assert tangle(apply_white_noise(bell_state(), NoiseModel.from_fidelity(0.5))) < 1e-12
    assert tangle(apply_white_noise(bell_state(), NoiseModel.from_fidelity(0.51))) > 0


def test_fidelity_with_pure_needs_pure_target():
    with pytest.raises(InvalidStateError):
        fidelity_with_pure(bell_state(), np.eye(4) / 4)


@given(seed=seeds)
def test_uhlmann_agrees_with_pure_overlap(seed):
    rng = np.random.default_rng(seed)
    rho, psi = random_mixed_state(rng), random_pure_state(rng)
    assert uhlmann_fidelity(rho, psi) == pytest.approx(fidelity_with_pure(rho, psi), abs=1e-8)


@given(seed=seeds)
def test_random_states_valid(seed):
    rng = np.random.default_rng(seed)
    for rho in (random_mixed_state(rng), random_pure_state(rng), random_mixed_state(rng, 2)):
        validate_density(rho)
    assert purity(random_pure_state(rng)) == pytest.approx(1.0)


def test_named_bases():
    np.testing.assert_allclose(Z_BASIS.kets, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(X_BASIS.kets[0], [1 / math.sqrt(2)] * 2, atol=1e-15)
    np.testing.assert_allclose(Y_BASIS.observable, [[0, -1j], [1j, 0]], atol=1e-15)


@given(omega=st.floats(-10, 10))
def test_linear_basis_period_pi(omega):
    a, b = linear_basis(omega), linear_basis(omega + math.pi)
    np.testing.assert_allclose(a.projectors, b.projectors, atol=1e-9)


@given(polar=angles, azimuth=st.floats(0, 2 * math.pi))
def test_bloch_basis_direction(polar, azimuth):
    B = bloch_basis(polar, azimuth)
    n = [math.sin(polar) * math.cos(azimuth), math.sin(polar) * math.sin(azimuth), math.cos(polar)]
    paulis = [X_BASIS.observable, Y_BASIS.observable, Z_BASIS.observable]
    expected = sum(c * p for c, p in zip(n, paulis))
    np.testing.assert_allclose(B.observable, expected, atol=1e-12)


def test_basis_must_be_orthonormal():
    with pytest.raises(ValueError):
        MeasurementBasis("bad", np.array([[1, 0], [1, 1]]))


def test_swapped_basis():
    assert np.allclose(Z_BASIS.swapped().kets, Z_BASIS.kets[::-1])


def test_schmidt_ket_reference_example():
    # theta = pi/2 swaps |H> and |V> up to phase
    ket = schmidt_ket(SchmidtParams(0.3, math.pi / 2, 0.0))
    assert abs(ket[3]) == pytest.approx(math.cos(0.3))
    assert abs(ket[0]) == pytest.approx(math.sin(0.3))


def test_schmidt_params_range():
    with pytest.raises(ValueError):
        SchmidtParams(2.0)
    with pytest.raises(ValueError):
        SchmidtParams.from_tangle(1.5)
