"""量子干涉分析: 杂化本征能量、暗态与最优耦合条件"""
import math
from dataclasses import dataclass

import numpy as np
from loguru import logger

from .errors import InfeasibleDetuning
from .params import SystemParams, collective_coupling


@dataclass(frozen=True)
class HybridEigenSet:
    """相干耦合 (δa₂, δa₁, δσ_ge) 的本征能量

    e_plus / e_minus / e_zero 为解析式 (仅在 Δ₁ = Ω 时与完整 3×3 谱一致),
    full_eigenvalues 为耦合矩阵的三个本征值 (升序)。
    """
    e_plus: float
    e_minus: float
    e_zero: float
    full_eigenvalues: tuple[float, float, float]


def coupling_matrix(params: SystemParams, delta2_eff: float) -> np.ndarray:
    c = collective_coupling(params).value
    return np.array([
        [delta2_eff, params.J, c],
        [params.J, params.delta1, 0.0],
        [c, 0.0, params.omega_atom],
    ])


def hybrid_eigenenergies(params: SystemParams, delta2_eff: float) -> HybridEigenSet:
    """E_± = ½(Ω + Δ̃₂ ± √(4(J² + Ng_a²) + (Ω − Δ̃₂)²)), E₀ = Ω"""
    omega = params.omega_atom
    total = params.J ** 2 + collective_coupling(params).squared
    root = math.sqrt(4.0 * total + (omega - delta2_eff) ** 2)
    full = np.linalg.eigvalsh(coupling_matrix(params, delta2_eff))
    return HybridEigenSet(
        e_plus=0.5 * (omega + delta2_eff + root),
        e_minus=0.5 * (omega + delta2_eff - root),
        e_zero=omega,
        full_eigenvalues=tuple(float(x) for x in np.sort(full)),
    )


def optimal_coupling(delta2_eff: float) -> float:
    """最优条件 J² + Ng_a² = 2ω_m(ω_m − Δ̃₂)

    Returns:
        float: 所需 J² + Ng_a² [ω_m²]
    """
    if delta2_eff > 1.0:
        raise InfeasibleDetuning(f"Δ̃₂ = {delta2_eff} > ω_m, 所需耦合强度平方为负")
    return 2.0 * (1.0 - delta2_eff)


def implied_cavity_coupling(delta2_eff: float, n_ga2: float) -> float:
    """给定 Ng_a² 时满足最优条件的 J"""
    remainder = optimal_coupling(delta2_eff) - n_ga2
    if remainder < 0:
        raise InfeasibleDetuning(f"Ng_a² = {n_ga2} 已超过最优条件所需的 {remainder + n_ga2}")
    return math.sqrt(remainder)


def resonance_check(params: SystemParams, delta2_eff: float, energy: float = 1.0) -> float:
    """耦合矩阵特征多项式 det(E − M) 在 E = ω_m 处的值

    Δ₁ = Ω = −ω_m 时, 其为零当且仅当最优条件成立。
    """
    if not (params.delta1 == params.omega_atom == -1.0):
        logger.debug(f"resonance_check: Δ₁ = {params.delta1}, Ω = {params.omega_atom} 不在 −ω_m 工作点")
    n_ga2 = collective_coupling(params).squared
    e = energy
    return ((e - delta2_eff) * (e - params.delta1) * (e - params.omega_atom)
            - params.J ** 2 * (e - params.omega_atom)
            - n_ga2 * (e - params.delta1))
