"""自检: 闭式谱与矩阵求解核对、解析极限与恒等式"""
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from loguru import logger

from ..utils import format_time, relative_error
from .cooling import cool_operating_point, evolve_trajectory, mean_phonon, thermal_distribution
from .figures import FIGURE_PANELS, panel_params
from .interference import hybrid_eigenenergies, implied_cavity_coupling, optimal_coupling, resonance_check
from .params import SystemParams, collective_coupling, default_params, with_overrides
from .spectrum import force_spectrum, frequency_grid, spectrum_matrix_oracle
from .steady_state import select_branch, solve_steady_state


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class CheckReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)


def random_params(rng: np.random.Generator, base: SystemParams | None = None) -> SystemParams:
    """随机抽取一组有效参数 (有效失谐模式)"""
    return with_overrides(base or default_params(), {
        "kappa1": float(rng.uniform(0.05, 3.0)),
        "kappa2": float(rng.uniform(0.5, 5.0)),
        "gamma": float(rng.uniform(0.05, 3.0)),
        "delta1": float(rng.uniform(-3.0, 3.0)),
        "omega_atom": float(rng.uniform(-3.0, 3.0)),
        "delta2_effective": float(rng.uniform(-3.0, 3.0)),
        "J": float(rng.uniform(0.0, 2.0)),
        "g_a": float(rng.uniform(0.0, 0.2)),
        "N": int(rng.integers(0, 301)),
    })


def fig2_params() -> list[SystemParams]:
    panel = FIGURE_PANELS["fig2"][0]
    return [panel_params(panel, curve) for curve in panel.curves]


def check_oracle_equivalence(draws: int = 100, seed: int = 20240601) -> CheckResult:
    grid = frequency_grid()
    rng = np.random.default_rng(seed)
    configs = fig2_params() + [random_params(rng) for _ in range(draws)]
    worst = 0.0
    for params in configs:
        closed = force_spectrum(grid, params, params.delta2)
        oracle = spectrum_matrix_oracle(grid, params, params.delta2)
        worst = max(worst, float(np.max(relative_error(closed, oracle))))
    return CheckResult("oracle equivalence", worst < 1e-10, f"{len(configs)} 组参数最大相对误差 {worst:.3e}")


def check_lorentzian_limit() -> CheckResult:
    params = with_overrides(default_params(), {"J": 0.0, "g_a": 0.0, "kappa2": 3.0})
    center = params.delta2
    peak = force_spectrum(center, params, center)
    half = force_spectrum(np.array([center - 3.0, center + 3.0]), params, center)
    error = max(abs(peak - 2.0 / 3.0), *np.abs(half - 1.0 / 3.0))
    return CheckResult("lorentzian limit", error < 1e-12, f"峰值 {peak!r}, 半高点 {half.tolist()}")


def check_dark_state(scales: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)) -> CheckResult:
    base = with_overrides(default_params(), {
        "delta1": -1.0, "omega_atom": -1.0, "J": 0.45, "N": 200, "g_a": 0.1,
        "delta2_effective": -0.1, "kappa2": 3.0,
    })
    heating = []
    ratio = math.nan
    for scale in scales:
        params = with_overrides(base, {"kappa1": scale, "gamma": scale})
        s_plus, s_minus = force_spectrum(np.array([1.0, -1.0]), params, params.delta2)
        heating.append(s_minus)
        ratio = s_minus / s_plus
    monotone = all(b < a for a, b in zip(heating, heating[1:]))
    return CheckResult("dark-state suppression", monotone and ratio < 1e-6,
                       f"S(−ω_m) 单调下降: {monotone}, γ = κ₁ = {scales[-1]} 时 S(−ω_m)/S(ω_m) = {ratio:.3e}")


def check_optimal_condition() -> CheckResult:
    required = optimal_coupling(-0.1)
    n_ga2 = collective_coupling(with_overrides(default_params(), {"N": 200, "g_a": 0.1})).squared
    j = implied_cavity_coupling(-0.1, n_ga2)
    params = with_overrides(default_params(), {
        "delta1": -1.0, "omega_atom": -1.0, "N": 200, "g_a": 0.1, "J": j, "delta2_effective": -0.1,
    })
    residual = abs(resonance_check(params, -0.1))
    passed = abs(required - 2.2) < 1e-12 and abs(j - 0.45) / 0.45 < 0.01 and residual < 1e-12
    return CheckResult("optimal coupling", passed, f"J² + Ng_a² = {required!r}, J = {j:.6f}, 残差 {residual:.3e}")


def check_eigen_identities(draws: int = 100, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        params = random_params(rng)
        params = with_overrides(params, {"delta1": params.omega_atom})
        eig = hybrid_eigenenergies(params, params.delta2)
        scale = max(1.0, abs(params.omega_atom), abs(params.delta2), params.J, collective_coupling(params).value) ** 2
        total = params.J ** 2 + collective_coupling(params).squared
        worst = max(
            worst,
            abs(eig.e_plus + eig.e_minus - (params.omega_atom + params.delta2)),
            abs(eig.e_plus * eig.e_minus - (params.omega_atom * params.delta2 - total)) / scale,
            *(min(abs(x - e) for x in eig.full_eigenvalues) / math.sqrt(scale)
              for e in (eig.e_plus, eig.e_minus, eig.e_zero)),
        )
    return CheckResult("eigen identities", worst < 1e-12, f"{draws} 组参数最大偏差 {worst:.3e}")


def check_phonon_kinetics() -> CheckResult:
    panel = FIGURE_PANELS["fig5"][0]
    params = with_overrides(panel_params(panel, {"N": 100}), {"J": 1.0})
    _, summary = cool_operating_point(params)
    initial = thermal_distribution(summary.n_m)
    t_final = 40.0 / (summary.a_down - summary.a_up)
    final = evolve_trajectory(initial, summary, t_final, samples=5)[-1]
    error = abs(mean_phonon(final) - summary.n_f) / summary.n_f
    return CheckResult("phonon kinetics", error < 1e-6,
                       f"N_max = {initial.n_max}, ⟨n⟩ = {mean_phonon(final):.10g}, n_f = {summary.n_f:.10g}")


def check_bad_cavity_robustness() -> CheckResult:
    panel = FIGURE_PANELS["fig3"][0]
    values = []
    for curve in panel.curves:
        params = panel_params(panel, curve)
        ss = select_branch(solve_steady_state(params))
        values.append(force_spectrum(np.array([1.0, -1.0]), params, ss.delta2_eff))
    values = np.array(values)
    spread = float(np.max(values.max(axis=0) / values.min(axis=0) - 1.0))
    return CheckResult("bad-cavity robustness", spread < 0.1, f"ω = ±ω_m 处最大相对差 {spread:.3%}")


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_oracle_equivalence,
    check_lorentzian_limit,
    check_dark_state,
    check_optimal_condition,
    check_eigen_identities,
    check_phonon_kinetics,
    check_bad_cavity_robustness,
)


def self_check() -> CheckReport:
    """依次运行全部自检"""
    report = CheckReport()
    for check in CHECKS:
        start = time.perf_counter()
        result = check()
        report.results.append(result)
        status = "通过" if result.passed else "失败"
        log = logger.info if result.passed else logger.error
        log(f"[{status}] {result.name}: {result.detail} ({format_time(time.perf_counter() - start)})")
    return report
