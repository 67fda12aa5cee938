import math
from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy import sparse
from scipy.integrate import solve_ivp

from ..const import CONSERVATION_TOL, NEGATIVE_PROB_TOL, ODE_ATOL, ODE_RTOL, TAIL_TOL
from .errors import IntegrationFailure, InvariantBreach, TruncationOverflow, Unstable, ValidationError
from .params import SystemParams, thermal_phonons
from .spectrum import sideband_values
from .steady_state import SteadyState, select_branch, solve_steady_state

IMPLICIT_METHODS = ("Radau", "BDF", "LSODA")


@dataclass(frozen=True)
class CoolingSummary:
    """冷却速率与终态声子数

    heating_dominated 时 (S_FF(ω_m) ≤ S_FF(−ω_m) 或 γ_c = 0) n_c 与 n_f 为 None。
    """
    s_plus: float
    s_minus: float
    G: float
    gamma_m: float
    n_m: float
    gamma_c: float
    n_c: float | None
    n_f: float | None
    a_down: float
    a_up: float

    @property
    def heating_dominated(self) -> bool:
        return self.n_c is None

    @property
    def stable(self) -> bool:
        return self.a_down > self.a_up


@dataclass(frozen=True, eq=False)
class PhononDistribution:
    """截断 Fock 空间上的声子数分布 P_0..P_Nmax"""
    p: np.ndarray
    time: float = 0.0
    clamped: int = 0  # 被置零的微小负概率个数

    @property
    def n_max(self) -> int:
        return self.p.size - 1


def cooling_summary(s_plus: float, s_minus: float, G: float, gamma_m: float, n_m: float) -> CoolingSummary:
    """由边带吸收谱值计算冷却速率 γ_c、量子极限 n_c 与终态声子数 n_f

    Args:
        s_plus: S_FF(ω_m)
        s_minus: S_FF(−ω_m)
        G: 线性化耦合
        gamma_m: 机械阻尼
        n_m: 热声子数
    """
    if s_plus < 0 or s_minus < 0:
        raise ValidationError(f"吸收谱值不能为负: S(+) = {s_plus}, S(−) = {s_minus}")
    g2 = G * G
    gamma_c = g2 * (s_plus - s_minus)
    a_down = g2 * s_plus + gamma_m * (n_m + 1.0)
    a_up = g2 * s_minus + gamma_m * n_m

    n_c: float | None = None
    n_f: float | None = None
    if s_plus > s_minus and gamma_c > 0:
        n_c = s_minus / (s_plus - s_minus)
        n_f = (gamma_m * n_m + gamma_c * n_c) / (gamma_m + gamma_c)
    elif s_plus > s_minus:
        logger.warning(f"光力冷却速率为零 (G = {G:.6g}), 不给出 n_c 与 n_f")
    else:
        logger.warning(f"加热占优: S(ω_m) = {s_plus:.6g} ≤ S(−ω_m) = {s_minus:.6g}")
    return CoolingSummary(
        s_plus=s_plus, s_minus=s_minus, G=G, gamma_m=gamma_m, n_m=n_m,
        gamma_c=gamma_c, n_c=n_c, n_f=n_f, a_down=a_down, a_up=a_up,
    )


def approximate_final_occupancy(summary: CoolingSummary) -> float | None:
    """ γ_m n_m ≪ γ_c n_c 时的近似 n_f ≈ γ_c n_c/(γ_m + γ_c) """
    if summary.n_c is None:
        return None
    return summary.gamma_c * summary.n_c / (summary.gamma_m + summary.gamma_c)


def cool_operating_point(params: SystemParams, branch: int | None = None) -> tuple[SteadyState, CoolingSummary]:
    """单个参数点: 稳态 -> 吸收谱 -> 冷却"""
    ss = select_branch(solve_steady_state(params), branch)
    s_plus, s_minus = sideband_values(params, ss.delta2_eff)
    summary = cooling_summary(s_plus, s_minus, ss.G, params.gamma_m, thermal_phonons(params))
    return ss, summary


def default_n_max(n_m: float) -> int:
    """截断能级: 热分布在 N 以上的尾部 < 1e-10, 上限 20·(n_m+1)"""
    if n_m <= 0:
        return 1
    ratio = n_m / (n_m + 1.0)
    needed = math.ceil(math.log(TAIL_TOL) / math.log(ratio)) - 1
    return max(1, min(needed, int(20 * (n_m + 1.0))))


def thermal_distribution(n_m: float, n_max: int | None = None) -> PhononDistribution:
    """截断并归一化的热 (几何) 分布"""
    n_max = default_n_max(n_m) if n_max is None else int(n_max)
    levels = np.arange(n_max + 1)
    ratio = n_m / (n_m + 1.0)
    p = np.power(ratio, levels)
    return PhononDistribution(p=p / p.sum())


def fock_state(n: int, n_max: int) -> PhononDistribution:
    """ 单个 Fock 态 |n⟩ """
    if not 0 <= n <= n_max:
        raise ValidationError(f"Fock 态 {n} 超出截断 {n_max}")
    p = np.zeros(n_max + 1)
    p[n] = 1.0
    return PhononDistribution(p=p)


def mean_phonon(dist: PhononDistribution) -> float:
    return float(np.dot(np.arange(dist.p.size), dist.p))


def ground_state_population(dist: PhononDistribution) -> float:
    return float(dist.p[0])


def steady_distribution(summary: CoolingSummary, n_max: int) -> PhononDistribution:
    """细致平衡下的稳态几何分布 P_n ∝ (a_up/a_down)^n"""
    if not summary.a_down > summary.a_up:
        raise Unstable(f"a_up = {summary.a_up:.6g} ≥ a_down = {summary.a_down:.6g}, 不存在稳态")
    ratio = summary.a_up / summary.a_down
    p = np.power(ratio, np.arange(n_max + 1))
    return PhononDistribution(p=p / p.sum(), time=math.inf)


def rate_generator(a_down: float, a_up: float, n_max: int) -> sparse.csc_matrix:
    """生灭链生成矩阵, 顶端反射截断, 每列之和为零

    dP_n/dt = a_down(n+1)P_{n+1} + a_up·n·P_{n−1} − [a_down·n + a_up(n+1)]P_n
    """
    levels = np.arange(n_max + 1, dtype=float)
    main = -(a_down * levels + a_up * (levels + 1.0))
    main[-1] = -a_down * n_max
    upper = a_down * levels[1:]
    lower = a_up * levels[1:]
    return sparse.diags([lower, main, upper], [-1, 0, 1], format="csc")


def _audit(p: np.ndarray, t: float, check_tail: bool) -> PhononDistribution:
    """检查单个时刻的概率守恒、非负性与截断尾部"""
    lowest = float(p.min())
    if lowest < -NEGATIVE_PROB_TOL:
        raise InvariantBreach(f"t = {t:.6g}: 出现负概率 {lowest:.3e}")
    negative = p < 0
    clamped = int(np.count_nonzero(negative))
    if clamped:
        p = np.where(negative, 0.0, p)
    total = float(p.sum())
    if abs(total - 1.0) > CONSERVATION_TOL:
        raise InvariantBreach(f"t = {t:.6g}: 概率不守恒, ΣP = {total!r}")
    if check_tail and p[-1] >= TAIL_TOL:
        raise TruncationOverflow(f"t = {t:.6g}: 截断能级概率 {p[-1]:.3e} 超过 {TAIL_TOL}")
    return PhononDistribution(p=p, time=t, clamped=clamped)


def evolve_trajectory(initial: PhononDistribution, summary: CoolingSummary, t_final: float,
                      samples: int = 2, method: str = "Radau",
                      rtol: float = ODE_RTOL, atol: float = ODE_ATOL) -> list[PhononDistribution]:
    """积分声子速率方程, 返回 [0, t_final] 上均匀采样的分布

    默认使用隐式 Radau: 生成矩阵最大速率约 a_down·N_max, 显式步进在热初态下步长受限。
    显式方法 (RK45 等) 仍可通过 method 选择。每个接受的积分步都检查守恒、非负性与截断尾部,
    采样点由稠密输出插值得到。

    Args:
        initial: 初始分布
        summary: 提供 a_down / a_up
        t_final: 终止时刻 [1/ω_m]
        samples: 采样点数 (含两端)
        method: solve_ivp 方法名
    """
    if summary.a_down < 0 or summary.a_up < 0:
        raise ValidationError(f"跃迁速率不能为负: a_down = {summary.a_down}, a_up = {summary.a_up}")
    if not t_final > 0 or samples < 2:
        raise ValidationError(f"无效的积分区间: t_final = {t_final}, samples = {samples}")

    generator = rate_generator(summary.a_down, summary.a_up, initial.n_max)
    options = {"jac": generator} if method in IMPLICIT_METHODS else {}
    solution = solve_ivp(
        lambda t, p: generator @ p,
        (0.0, t_final),
        initial.p.astype(float),
        method=method,
        dense_output=True,
        rtol=rtol,
        atol=atol,
        **options,
    )
    if not solution.success:
        raise IntegrationFailure(f"速率方程积分失败: {solution.message}")
    logger.debug(f"速率方程积分完成: {method}, N_max = {initial.n_max}, "
                 f"{solution.t.size - 1} 步, 函数求值 {solution.nfev} 次")

    steps = [_audit(solution.y[:, k], float(t), check_tail=t > 0) for k, t in enumerate(solution.t)]
    times = np.linspace(0.0, t_final, samples)
    values = solution.sol(times)
    values[:, 0] = initial.p
    values[:, -1] = solution.y[:, -1]
    trajectory = [_audit(values[:, k], float(t), check_tail=t > 0) for k, t in enumerate(times)]

    clamped = sum(dist.clamped for dist in steps)
    if clamped:
        logger.warning(f"速率方程积分中 {clamped} 个微小负概率被置零")
    return trajectory


def evolve_rate_equation(initial: PhononDistribution, summary: CoolingSummary, t_final: float,
                         method: str = "Radau") -> PhononDistribution:
    """积分到 t_final, 返回终态分布"""
    return evolve_trajectory(initial, summary, t_final, samples=2, method=method)[-1]
