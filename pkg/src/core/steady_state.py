import math
from dataclasses import dataclass

import numpy as np
from loguru import logger

from ..const import RESIDUAL_TOL, WEAK_COUPLING_WARN
from .errors import Degenerate, InvariantBreach, NoPhysicalRoot, ValidationError
from .params import SystemParams, collective_coupling


@dataclass(frozen=True)
class SteadyState:
    """平均场稳态"""
    a1: complex
    a2: complex
    b: complex
    sigma_ge: complex
    delta2_eff: float
    G: float
    residual: float

    @property
    def intensity(self) -> float:
        """ 腔 2 光子数 |⟨a₂⟩|² """
        return abs(self.a2) ** 2


@dataclass(frozen=True)
class BranchSet:
    """多稳态分支, 按 |⟨a₂⟩|² 升序"""
    solutions: tuple[SteadyState, ...]
    selected: int = 0

    @property
    def chosen(self) -> SteadyState:
        return self.solutions[self.selected]

    def __len__(self) -> int:
        return len(self.solutions)


@dataclass(frozen=True)
class DiagnosticsReport:
    """弱耦合近似检查"""
    g_over_kappa2: float
    g_over_omega_m: float
    g2_over_kappa2_omega_m: float
    threshold: float = WEAK_COUPLING_WARN

    @property
    def ratios(self) -> dict[str, float]:
        return {
            "G/kappa2": self.g_over_kappa2,
            "G/omega_m": self.g_over_omega_m,
            "G^2/(kappa2*omega_m)": self.g2_over_kappa2_omega_m,
        }

    @property
    def passed(self) -> bool:
        return all(value <= self.threshold for value in self.ratios.values())


def _hybrid_loading(params: SystemParams) -> complex:
    """腔 2 有效衰减中的辅助项 κ₂ + Ng_a²/(γ+iΩ) + J²/(κ₁+iΔ₁)"""
    coupling = collective_coupling(params)
    loading = complex(params.kappa2, 0.0)
    if params.J != 0:
        if params.kappa1 == 0 and params.delta1 == 0:
            raise Degenerate("κ₁ = Δ₁ = 0 且 J ≠ 0, 腔 1 响应发散")
        loading += params.J ** 2 / complex(params.kappa1, params.delta1)
    if coupling.squared != 0:
        if params.gamma == 0 and params.omega_atom == 0:
            raise Degenerate("γ = Ω = 0 且 Ng_a² ≠ 0, 原子响应发散")
        loading += coupling.squared / complex(params.gamma, params.omega_atom)
    return loading


def _shift_coefficient(params: SystemParams) -> float:
    """ Δ̃₂ = Δ₂ − η·|⟨a₂⟩|² 中的 η = 2g²ω_m/(γ_m² + ω_m²) """
    return 2.0 * params.g ** 2 / (params.gamma_m ** 2 + 1.0)


def langevin_residual(params: SystemParams, a1: complex, a2: complex, b: complex,
                      sigma_ge: complex, delta2_bare: float) -> float:
    """平均场 Langevin 方程右端的最大模

    Args:
        delta2_bare: 裸失谐 Δ₂ (有效模式下由 Δ̃₂ 反推)
    """
    coupling = collective_coupling(params).value
    force = b + b.conjugate()
    rhs = (
        -complex(params.kappa1, params.delta1) * a1 - 1j * params.J * a2,
        -complex(params.kappa2, delta2_bare) * a2 - 1j * params.J * a1 - 1j * coupling * sigma_ge
        + 1j * params.g * a2 * force + params.drive,
        -complex(params.gamma_m, 1.0) * b + 1j * params.g * abs(a2) ** 2,
        -complex(params.gamma, params.omega_atom) * sigma_ge - 1j * coupling * a2,
    )
    return max(abs(value) for value in rhs)


def _mean_fields(params: SystemParams, loading: complex, delta2_eff: float,
                 delta2_bare: float | None) -> SteadyState:
    """由 Δ̃₂ 回代出全部平均场"""
    coupling = collective_coupling(params)
    denominator = loading + 1j * delta2_eff
    if denominator == 0:
        raise Degenerate(f"K + iΔ̃₂ = 0 (Δ̃₂ = {delta2_eff}), 腔 2 平均场发散")
    a2 = params.drive / denominator
    a1 = -1j * params.J * a2 / complex(params.kappa1, params.delta1) if params.J != 0 else 0j
    sigma_ge = (-1j * coupling.value * a2 / complex(params.gamma, params.omega_atom)
                if coupling.squared != 0 else 0j)
    b = 1j * params.g * abs(a2) ** 2 / complex(params.gamma_m, 1.0)
    shift = params.g * 2.0 * b.real
    if delta2_bare is None:
        delta2_bare = delta2_eff + shift
    else:
        delta2_eff = delta2_bare - shift
    residual = langevin_residual(params, a1, a2, b, sigma_ge, delta2_bare)
    return SteadyState(
        a1=complex(a1),
        a2=complex(a2),
        b=complex(b),
        sigma_ge=complex(sigma_ge),
        delta2_eff=float(delta2_eff),
        G=effective_coupling_value(params.g, a2),
        residual=float(residual),
    )


def effective_coupling_value(g: float, a2: complex) -> float:
    return float(g * abs(a2))


def effective_coupling(ss: SteadyState, params: SystemParams) -> float:
    """ 线性化耦合 G = g·|⟨a₂⟩| (取非负实数) """
    return effective_coupling_value(params.g, ss.a2)


def intensity_cubic(params: SystemParams) -> np.ndarray:
    """|⟨a₂⟩|² 满足的实三次方程系数 (降幂)

    x·[Re(K)² + (Im(K) + Δ₂ − ηx)²] = |ε|², K 为腔 2 的复载荷
    """
    loading = _hybrid_loading(params)
    eta = _shift_coefficient(params)
    u = loading.imag + params.delta2
    return np.array([eta ** 2, -2.0 * u * eta, loading.real ** 2 + u ** 2, -params.epsilon ** 2])


def fixed_point_map(x: float, params: SystemParams) -> float:
    """ x -> |ε|²/|K + iΔ̃₂(x)|², 其不动点即稳态光强 """
    loading = _hybrid_loading(params)
    if params.is_effective:
        delta2_eff = params.delta2
    else:
        delta2_eff = params.delta2 - _shift_coefficient(params) * x
    denominator = abs(loading + 1j * delta2_eff) ** 2
    if denominator == 0:
        raise Degenerate(f"K + iΔ̃₂ = 0 (Δ̃₂ = {delta2_eff}), 不动点映射无定义")
    return params.epsilon ** 2 / denominator


def _polish_root(coeffs: np.ndarray, x: float, iterations: int = 3) -> float:
    """牛顿迭代修正根"""
    derivative = np.polyder(coeffs)
    for _ in range(iterations):
        slope = np.polyval(derivative, x)
        if slope == 0:
            break
        step = np.polyval(coeffs, x) / slope
        if not math.isfinite(step):
            break
        x -= step
    return x


def _physical_roots(coeffs: np.ndarray) -> list[float]:
    """三次方程的非负实根, 升序去重"""
    if coeffs[-1] == 0:
        return [0.0]
    roots = np.roots(coeffs)
    real: list[float] = []
    for root in roots:
        scale = max(1.0, abs(root))
        if abs(root.imag) > 1e-7 * scale or root.real < -1e-9 * scale:
            continue
        x = max(_polish_root(coeffs, float(root.real)), 0.0)
        if all(abs(x - other) > 1e-9 * max(1.0, x) for other in real):
            real.append(x)
    return sorted(real)


def solve_steady_state(params: SystemParams) -> BranchSet:
    """求解平均场稳态

    裸失谐模式: 消去 ⟨b⟩ 得到关于 |⟨a₂⟩|² 的实三次方程, 每个非负实根对应一个分支;
    有效失谐模式: Δ̃₂ 固定, 一步求出唯一分支。

    Returns:
        BranchSet: 默认选中光强最小的分支
    """
    loading = _hybrid_loading(params)
    tolerance = RESIDUAL_TOL * max(1.0, abs(params.epsilon))

    if params.is_effective:
        solutions = [_mean_fields(params, loading, params.delta2, None)]
    else:
        coeffs = intensity_cubic(params)
        roots = _physical_roots(coeffs)
        if not roots:
            raise NoPhysicalRoot(f"三次方程没有非负实根: 系数 {coeffs.tolist()}")
        eta = _shift_coefficient(params)
        solutions = [_mean_fields(params, loading, params.delta2 - eta * x, params.delta2) for x in roots]
        logger.debug(f"稳态求解: 三次方程 {len(roots)} 个物理根 {roots}")

    for index, ss in enumerate(solutions):
        if ss.residual >= tolerance:
            raise InvariantBreach(f"分支 {index} 残差 {ss.residual:.3e} 超过容差 {tolerance:.3e}")
    return BranchSet(solutions=tuple(solutions), selected=0)


def select_branch(branches: BranchSet, index: int | None = None) -> SteadyState:
    """选择分支, 默认为光强最小的分支"""
    if index is None:
        return branches.chosen
    if not 0 <= index < len(branches):
        raise ValidationError(f"分支序号 {index} 超出范围 [0, {len(branches) - 1}]")
    return branches.solutions[index]


def weak_coupling_validity(ss: SteadyState, params: SystemParams) -> DiagnosticsReport:
    """检查忽略 NAMR 反作用的弱耦合条件"""
    kappa2 = params.kappa2
    report = DiagnosticsReport(
        g_over_kappa2=ss.G / kappa2 if kappa2 > 0 else (math.inf if ss.G > 0 else 0.0),
        g_over_omega_m=ss.G,
        g2_over_kappa2_omega_m=ss.G ** 2 / kappa2 if kappa2 > 0 else (math.inf if ss.G > 0 else 0.0),
    )
    if not report.passed:
        logger.warning(f"弱耦合条件不满足: {report.ratios}")
    return report
