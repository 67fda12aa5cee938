from dataclasses import dataclass
from enum import Enum

import numpy as np
from loguru import logger

from ..const import OMEGA_MAX, OMEGA_MIN, OMEGA_POINTS
from .errors import PoleAtGrid, SingularMatrix, ValidationError
from .params import SystemParams, collective_coupling


class SpectrumMethod(Enum):
    CLOSED_FORM = "closed_form"
    MATRIX_ORACLE = "matrix_oracle"


@dataclass(frozen=True, eq=False)
class SpectrumCurve:
    """辐射力吸收谱 S_FF(ω), 单位 1/ω_m"""
    omega: np.ndarray
    s_ff: np.ndarray
    method: SpectrumMethod

    def __post_init__(self) -> None:
        if self.omega.shape != self.s_ff.shape:
            raise ValidationError("频率网格与谱值长度不一致")
        if np.any(np.diff(self.omega) <= 0):
            raise ValidationError("频率网格必须严格递增")

    def at(self, omega: float) -> float:
        """ 网格上最接近 omega 的谱值 """
        return float(self.s_ff[int(np.argmin(np.abs(self.omega - omega)))])


def frequency_grid(lo: float = OMEGA_MIN, hi: float = OMEGA_MAX, points: int = OMEGA_POINTS) -> np.ndarray:
    """均匀频率网格 [ω_m]"""
    if points < 2 or not hi > lo:
        raise ValidationError(f"无效的频率网格: [{lo}, {hi}] × {points}")
    return np.linspace(lo, hi, int(points))


def _check_poles(omega: np.ndarray, params: SystemParams, delta2_eff: float) -> None:
    """衰减率严格为零时, 共振频率处的响应发散"""
    isolated = params.J == 0 and collective_coupling(params).squared == 0
    if isolated and params.kappa2 == 0 and np.any(omega == delta2_eff):
        raise PoleAtGrid(f"κ₂ = 0 时 ω = Δ̃₂ = {delta2_eff} 为极点")
    if params.J != 0 and params.kappa1 == 0 and np.any(omega == params.delta1):
        raise PoleAtGrid(f"κ₁ = 0 时 ω = Δ₁ = {params.delta1} 为极点")
    if collective_coupling(params).squared != 0 and params.gamma == 0 and np.any(omega == params.omega_atom):
        raise PoleAtGrid(f"γ = 0 时 ω = Ω = {params.omega_atom} 为极点")


def _channel_terms(omega: np.ndarray, params: SystemParams) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """腔 1 与原子通道对 H(ω) 的贡献及其噪声权重"""
    n_ga2 = collective_coupling(params).squared
    zeros = np.zeros_like(omega, dtype=complex)
    if params.J != 0:
        chi1 = params.kappa1 - 1j * (omega - params.delta1)
        cavity = params.J ** 2 / chi1
        cavity_noise = 2.0 * params.J ** 2 * params.kappa1 / np.abs(chi1) ** 2
    else:
        cavity, cavity_noise = zeros, zeros.real
    if n_ga2 != 0:
        chi_a = params.gamma - 1j * (omega - params.omega_atom)
        atoms = n_ga2 / chi_a
        atom_noise = 2.0 * n_ga2 * params.gamma / np.abs(chi_a) ** 2
    else:
        atoms, atom_noise = zeros, zeros.real
    return cavity, cavity_noise, atoms, atom_noise


def response_denominator(omega: float | np.ndarray, params: SystemParams, delta2_eff: float) -> complex | np.ndarray:
    """H(ω) = κ₂ − i(ω−Δ̃₂) + J²/(κ₁ − i(ω−Δ₁)) + Ng_a²/(γ − i(ω−Ω))"""
    scalar = np.isscalar(omega)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    _check_poles(w, params, delta2_eff)
    cavity, _, atoms, _ = _channel_terms(w, params)
    h = params.kappa2 - 1j * (w - delta2_eff) + cavity + atoms
    return complex(h[0]) if scalar else h


def force_spectrum(omega: float | np.ndarray, params: SystemParams, delta2_eff: float) -> float | np.ndarray:
    """闭式吸收谱

    S_FF(ω) = [2κ₂ + 2J²κ₁/|κ₁−i(ω−Δ₁)|² + 2Ng_a²γ/|γ−i(ω−Ω)|²] / |H(ω)|²
    """
    scalar = np.isscalar(omega)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    _check_poles(w, params, delta2_eff)
    cavity, cavity_noise, atoms, atom_noise = _channel_terms(w, params)
    h = params.kappa2 - 1j * (w - delta2_eff) + cavity + atoms
    s = (2.0 * params.kappa2 + cavity_noise + atom_noise) / np.abs(h) ** 2
    return float(s[0]) if scalar else s


def _susceptibility(omega: np.ndarray, params: SystemParams, delta2_eff: float) -> tuple[np.ndarray, np.ndarray]:
    """频域线性涨落方程 M(ω)·x = B·noise

    x = (δa₂, δa₁, δσ_ge), 与 δa₂ 不耦合的通道不参与组装。
    """
    coupling = collective_coupling(params).value
    channels = [(params.kappa2, delta2_eff, None)]
    if params.J != 0:
        channels.append((params.kappa1, params.delta1, params.J))
    if coupling != 0:
        channels.append((params.gamma, params.omega_atom, coupling))

    size = len(channels)
    matrix = np.zeros((omega.size, size, size), dtype=complex)
    noise = np.zeros((size, size))
    for k, (decay, detuning, link) in enumerate(channels):
        # 时间依赖 e^{-iωt}: d/dt -> -iω
        matrix[:, k, k] = decay + 1j * detuning - 1j * omega
        noise[k, k] = np.sqrt(2.0 * decay)
        if link is not None:
            matrix[:, 0, k] = 1j * link
            matrix[:, k, 0] = 1j * link
    return matrix, noise


def spectrum_matrix_oracle(omega: float | np.ndarray, params: SystemParams, delta2_eff: float) -> float | np.ndarray:
    """由涨落方程数值求解的吸收谱, 用于核对闭式结果

    δa₂(ω) 表示为各输入噪声的线性组合, 真空关联 ⟨O_in O_in†⟩ = δ 下
    S_FF(ω) = Σ_j |T_j(ω)|²。
    """
    scalar = np.isscalar(omega)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    matrix, noise = _susceptibility(w, params, delta2_eff)
    condition = np.linalg.cond(matrix)
    singular = ~np.isfinite(condition) | (condition * np.finfo(float).eps > 1.0)
    if np.any(singular):
        first = float(w[np.argmax(singular)])
        raise SingularMatrix(f"极化率矩阵在 ω = {first} 处数值奇异")
    try:
        transfer = np.linalg.solve(matrix, np.broadcast_to(noise.astype(complex), matrix.shape))
    except np.linalg.LinAlgError as e:
        raise SingularMatrix(f"极化率矩阵求解失败: {e}") from e
    s = np.sum(np.abs(transfer[:, 0, :]) ** 2, axis=-1)
    return float(s[0]) if scalar else s


def spectrum_curve(params: SystemParams, delta2_eff: float, grid: np.ndarray | None = None,
                   method: SpectrumMethod = SpectrumMethod.CLOSED_FORM) -> SpectrumCurve:
    """在频率网格上计算吸收谱"""
    omega = frequency_grid() if grid is None else np.asarray(grid, dtype=float)
    if method is SpectrumMethod.CLOSED_FORM:
        values = force_spectrum(omega, params, delta2_eff)
    else:
        values = spectrum_matrix_oracle(omega, params, delta2_eff)
    values = np.atleast_1d(values)
    if np.any(values < 0):
        logger.warning(f"吸收谱出现负值: min = {values.min():.3e}")
    return SpectrumCurve(omega=np.atleast_1d(omega), s_ff=values, method=method)


def sideband_values(params: SystemParams, delta2_eff: float) -> tuple[float, float]:
    """ (S_FF(ω_m), S_FF(−ω_m)), 分别对应冷却与加热跃迁 """
    values = force_spectrum(np.array([1.0, -1.0]), params, delta2_eff)
    return float(values[0]), float(values[1])


def local_minima(curve: SpectrumCurve, lo: float | None = None, hi: float | None = None) -> list[float]:
    """网格分辨的内部局部极小值位置 (Fano 谷)

    Args:
        lo, hi: 只在 [lo, hi] 窗口内查找, 窗口端点不算内部点
    """
    mask = np.ones_like(curve.omega, dtype=bool)
    if lo is not None:
        mask &= curve.omega >= lo
    if hi is not None:
        mask &= curve.omega <= hi
    omega, s = curve.omega[mask], curve.s_ff[mask]
    if s.size < 3:
        return []
    inner = (s[1:-1] < s[:-2]) & (s[1:-1] <= s[2:])
    return [float(x) for x in omega[1:-1][inner]]
