import numpy as np
import pytest

from src.core.errors import PoleAtGrid, SingularMatrix, ValidationError
from src.core.params import default_params, with_overrides
from src.core.self_check import check_bad_cavity_robustness, check_oracle_equivalence, fig2_params, random_params
from src.core.spectrum import (
    SpectrumCurve,
    SpectrumMethod,
    force_spectrum,
    frequency_grid,
    local_minima,
    response_denominator,
    sideband_values,
    spectrum_curve,
    spectrum_matrix_oracle,
)
from src.utils import relative_error


def test_lorentzian_limit():
    params = with_overrides(default_params(), {"J": 0.0, "g_a": 0.0, "kappa2": 3.0})
    assert force_spectrum(1.0, params, 1.0) == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert force_spectrum(4.0, params, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert force_spectrum(-2.0, params, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_response_denominator_bare_cavity():
    params = default_params()
    assert response_denominator(0.5, params, 1.0) == pytest.approx(complex(3.0, 0.5))


def test_oracle_matches_closed_form_on_default_grid():
    grid = frequency_grid()
    rng = np.random.default_rng(1234)
    for params in fig2_params() + [random_params(rng) for _ in range(20)]:
        closed = force_spectrum(grid, params, params.delta2)
        oracle = spectrum_matrix_oracle(grid, params, params.delta2)
        assert np.max(relative_error(closed, oracle)) < 1e-10


def test_oracle_equivalence_check():
    assert check_oracle_equivalence().passed


def test_spectrum_is_positive():
    rng = np.random.default_rng(99)
    grid = frequency_grid(points=801)
    for _ in range(20):
        params = random_params(rng)
        assert np.all(force_spectrum(grid, params, params.delta2) > 0)


def test_fano_dip_near_atomic_resonance():
    params = with_overrides(default_params(), {"J": 1.0, "g_a": 0.1})
    curve = spectrum_curve(params, params.delta2)
    dips = local_minima(curve, -1.2, -0.8)
    assert dips
    lowest = min(curve.at(x) for x in dips)
    assert lowest < curve.at(-1.2)
    assert lowest < curve.at(-0.8)


def test_bare_cavity_has_no_dip():
    curve = spectrum_curve(default_params(), 1.0)
    assert local_minima(curve) == []


def test_local_minima_synthetic():
    omega = np.linspace(-2.0, 2.0, 401)
    curve = SpectrumCurve(omega, (omega ** 2 - 1.0) ** 2, SpectrumMethod.CLOSED_FORM)
    assert local_minima(curve) == pytest.approx([-1.0, 1.0], abs=1e-9)
    assert local_minima(curve, 0.0, 2.0) == pytest.approx([1.0], abs=1e-9)


def test_spectrum_curve_methods_agree():
    params = with_overrides(default_params(), {"J": 1.0, "g_a": 0.1})
    grid = frequency_grid(points=201)
    closed = spectrum_curve(params, params.delta2, grid)
    oracle = spectrum_curve(params, params.delta2, grid, SpectrumMethod.MATRIX_ORACLE)
    assert oracle.method is SpectrumMethod.MATRIX_ORACLE
    np.testing.assert_allclose(closed.s_ff, oracle.s_ff, rtol=1e-10)


def test_sideband_values():
    params = with_overrides(default_params(), {"J": 1.0, "g_a": 0.1})
    s_plus, s_minus = sideband_values(params, params.delta2)
    assert s_plus == force_spectrum(1.0, params, params.delta2)
    assert s_minus == force_spectrum(-1.0, params, params.delta2)


def test_curve_requires_increasing_grid():
    omega = np.array([0.0, 1.0, 1.0])
    with pytest.raises(ValidationError):
        SpectrumCurve(omega, np.ones(3), SpectrumMethod.CLOSED_FORM)
    with pytest.raises(ValidationError):
        frequency_grid(1.0, -1.0, 11)


def test_pole_on_grid():
    params = with_overrides(default_params(), {"J": 1.0, "kappa1": 0.0})
    with pytest.raises(PoleAtGrid):
        force_spectrum(np.array([-2.0, -1.0, 0.0]), params, 1.0)
    params = with_overrides(default_params(), {"g_a": 0.1, "gamma": 0.0})
    with pytest.raises(PoleAtGrid):
        force_spectrum(-1.0, params, 1.0)


def test_lossless_cavity_pole_on_grid():
    params = with_overrides(default_params(), {"kappa2": 0.0})
    with pytest.raises(PoleAtGrid):
        force_spectrum(np.array([0.0, 1.0, 2.0]), params, 1.0)
    with pytest.raises(PoleAtGrid):
        response_denominator(1.0, params, 1.0)
    assert np.isfinite(force_spectrum(np.array([0.0, 2.0]), params, 1.0)).all()


def test_oracle_singular_matrix():
    params = with_overrides(default_params(), {"kappa2": 0.0})
    with pytest.raises(SingularMatrix):
        spectrum_matrix_oracle(np.array([0.5, 1.0]), params, 1.0)


def test_bad_cavity_robustness():
    assert check_bad_cavity_robustness().passed
