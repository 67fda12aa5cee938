import math

import numpy as np
import pytest

from src.core.errors import InfeasibleDetuning
from src.core.interference import (
    coupling_matrix,
    hybrid_eigenenergies,
    implied_cavity_coupling,
    optimal_coupling,
    resonance_check,
)
from src.core.params import collective_coupling, default_params, with_overrides
from src.core.self_check import check_dark_state, check_eigen_identities, check_optimal_condition, random_params

WORKING_POINT = {"delta1": -1.0, "omega_atom": -1.0, "N": 200, "g_a": 0.1, "delta2_effective": -0.1}


def test_optimal_coupling():
    assert optimal_coupling(-0.1) == pytest.approx(2.2, abs=1e-12)
    assert optimal_coupling(1.0) == 0.0
    with pytest.raises(InfeasibleDetuning):
        optimal_coupling(1.5)


def test_implied_cavity_coupling():
    j = implied_cavity_coupling(-0.1, 2.0)
    assert j == pytest.approx(math.sqrt(0.2), rel=1e-12)
    assert abs(j - 0.45) / 0.45 < 0.01
    with pytest.raises(InfeasibleDetuning):
        implied_cavity_coupling(0.5, 2.0)


def test_resonance_check_vanishes_at_optimum():
    params = with_overrides(default_params(), dict(WORKING_POINT, J=math.sqrt(0.2)))
    assert abs(resonance_check(params, -0.1)) < 1e-12

    params = with_overrides(default_params(), dict(WORKING_POINT, J=0.45))
    assert resonance_check(params, -0.1) == pytest.approx(-0.005, abs=1e-12)


def test_optimum_puts_upper_branch_on_mechanical_frequency():
    params = with_overrides(default_params(), dict(WORKING_POINT, J=math.sqrt(0.2)))
    eig = hybrid_eigenenergies(params, -0.1)
    assert eig.e_plus == pytest.approx(1.0, abs=1e-12)
    assert min(abs(x - 1.0) for x in eig.full_eigenvalues) < 1e-12


def test_eigen_identities_random():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        params = random_params(rng)
        params = with_overrides(params, {"delta1": params.omega_atom})
        eig = hybrid_eigenenergies(params, params.delta2)
        total = params.J ** 2 + collective_coupling(params).squared
        assert eig.e_plus + eig.e_minus == pytest.approx(params.omega_atom + params.delta2, abs=1e-12)
        assert eig.e_plus * eig.e_minus == pytest.approx(params.omega_atom * params.delta2 - total, abs=1e-12)
        assert eig.e_zero == params.omega_atom
        assert min(abs(x - params.omega_atom) for x in eig.full_eigenvalues) < 1e-9
        np.testing.assert_allclose(
            sorted(eig.full_eigenvalues), sorted((eig.e_plus, eig.e_minus, eig.e_zero)), atol=1e-9
        )


def test_full_spectrum_is_symmetric_matrix_spectrum():
    params = with_overrides(default_params(), {"J": 0.7, "g_a": 0.1, "delta1": 0.3})
    matrix = coupling_matrix(params, 0.2)
    np.testing.assert_array_equal(matrix, matrix.T)
    eig = hybrid_eigenenergies(params, 0.2)
    assert sum(eig.full_eigenvalues) == pytest.approx(np.trace(matrix), abs=1e-12)


def test_dark_state_suppression():
    assert check_dark_state().passed


def test_interference_self_checks():
    assert check_optimal_condition().passed
    assert check_eigen_identities().passed
