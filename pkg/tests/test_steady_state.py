import math

import numpy as np
import pytest

from src.core.errors import Degenerate, ValidationError
from src.core.params import default_params, with_overrides
from src.core.self_check import random_params
from src.core.steady_state import (
    effective_coupling,
    fixed_point_map,
    intensity_cubic,
    langevin_residual,
    select_branch,
    solve_steady_state,
    weak_coupling_validity,
)

# 裸失谐 Δ₂ = 3, κ₂ = 0.1 的强驱动, 光强方程有三个物理根
BISTABLE = {"delta2": 3.0, "kappa2": 0.1, "epsilon": 5900.0}


def test_effective_mode_single_branch():
    params = default_params()
    branches = solve_steady_state(params)
    assert len(branches) == 1
    ss = branches.chosen
    assert ss.delta2_eff == 1.0
    assert ss.a2 == pytest.approx(6000.0 / complex(3.0, 1.0), rel=1e-14)
    assert ss.a1 == 0
    assert ss.sigma_ge == 0
    assert ss.G == pytest.approx(1.2e-4 * 6000.0 / math.sqrt(10.0), rel=1e-13)
    assert ss.residual < 1e-10 * 6000.0


def test_mean_fields_with_atoms_and_auxiliary_cavity():
    params = with_overrides(default_params(), {"J": 1.0, "g_a": 0.1})
    ss = select_branch(solve_steady_state(params))
    loading = 3.0 + 1.0 / complex(0.1, -1.0) + 2.0 / complex(0.1, -1.0)
    a2 = 6000.0 / (loading + 1j)
    assert ss.a2 == pytest.approx(a2, rel=1e-13)
    assert ss.a1 == pytest.approx(-1j * a2 / complex(0.1, -1.0), rel=1e-13)
    assert ss.sigma_ge == pytest.approx(-1j * math.sqrt(2.0) * a2 / complex(0.1, -1.0), rel=1e-13)
    assert ss.b == pytest.approx(1j * 1.2e-4 * abs(a2) ** 2 / complex(params.gamma_m, 1.0), rel=1e-13)


def test_drive_phase_rotates_fields_only():
    plain = select_branch(solve_steady_state(default_params()))
    rotated = select_branch(solve_steady_state(with_overrides(default_params(), {"epsilon_phase": math.pi})))
    assert rotated.a2 == pytest.approx(-plain.a2, rel=1e-12)
    assert rotated.G == pytest.approx(plain.G, rel=1e-14)
    assert rotated.b == pytest.approx(plain.b, rel=1e-12)


def test_bare_mode_fixed_point():
    params = with_overrides(default_params(), {"delta2": 1.0})
    branches = solve_steady_state(params)
    assert len(branches) >= 1
    for ss in branches.solutions:
        assert fixed_point_map(ss.intensity, params) == pytest.approx(ss.intensity, rel=1e-9)
        assert ss.delta2_eff < params.delta2


def test_bare_mode_without_radiation_pressure_matches_effective():
    effective = select_branch(solve_steady_state(default_params()))
    bare = solve_steady_state(with_overrides(default_params(), {"g": 0.0, "delta2": 1.0}))
    assert len(bare) == 1
    assert bare.chosen.delta2_eff == 1.0
    assert abs(bare.chosen.a2 - effective.a2) <= 1e-12 * abs(effective.a2)
    assert bare.chosen.G == 0.0


def test_bare_mode_fixed_points_random():
    rng = np.random.default_rng(7)
    for _ in range(100):
        params = with_overrides(random_params(rng), {"delta2": float(rng.uniform(-3.0, 5.0))})
        for ss in solve_steady_state(params).solutions:
            assert fixed_point_map(ss.intensity, params) == pytest.approx(ss.intensity, rel=1e-8)
            assert ss.delta2_eff <= params.delta2


def test_bare_mode_bistability():
    params = with_overrides(default_params(), BISTABLE)
    branches = solve_steady_state(params)
    assert len(branches) == 3
    intensities = [ss.intensity for ss in branches.solutions]
    assert intensities == sorted(intensities)
    assert select_branch(branches) is branches.solutions[0]
    assert select_branch(branches, 2).intensity == max(intensities)
    for ss in branches.solutions:
        assert ss.residual < 1e-10 * params.epsilon


def test_cubic_roots_are_fixed_points():
    params = with_overrides(default_params(), BISTABLE)
    roots = np.roots(intensity_cubic(params))
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-6 * abs(r))
    assert len(real) == 3
    for x in real:
        assert fixed_point_map(x, params) == pytest.approx(x, rel=1e-8)


def test_select_branch_out_of_range():
    branches = solve_steady_state(default_params())
    with pytest.raises(ValidationError):
        select_branch(branches, 1)


def test_degenerate_auxiliary_cavity():
    params = with_overrides(default_params(), {"J": 1.0, "kappa1": 0.0, "delta1": 0.0})
    with pytest.raises(Degenerate):
        solve_steady_state(params)


def test_lossless_resonant_cavity_is_degenerate():
    params = with_overrides(default_params(), {"kappa2": 0.0, "delta2_effective": 0.0})
    with pytest.raises(Degenerate):
        solve_steady_state(params)
    with pytest.raises(Degenerate):
        fixed_point_map(1.0, params)


def test_langevin_residual_vanishes_without_drive():
    params = with_overrides(default_params(), {"epsilon": 0.0})
    assert langevin_residual(params, 0j, 0j, 0j, 0j, params.delta2) == 0.0
    ss = select_branch(solve_steady_state(params))
    assert ss.a2 == 0
    assert ss.G == 0.0


def test_effective_coupling_nonnegative():
    params = with_overrides(default_params(), {"epsilon_phase": 2.0})
    ss = select_branch(solve_steady_state(params))
    assert effective_coupling(ss, params) == ss.G >= 0.0


def test_weak_coupling_validity():
    params = default_params()
    report = weak_coupling_validity(select_branch(solve_steady_state(params)), params)
    assert report.passed
    assert report.ratios["G/omega_m"] == pytest.approx(0.2277, abs=1e-3)

    strong = with_overrides(params, {"epsilon": 30000.0})
    report = weak_coupling_validity(select_branch(solve_steady_state(strong)), strong)
    assert not report.passed
