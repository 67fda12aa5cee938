import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

import numpy as np
import rtoml
from loguru import logger
from scipy.constants import Boltzmann, hbar

from ..const import DEFAULT_CONFIG
from .errors import ConfigError, ValidationError

# 配置键 -> 说明; 顺序即 render_config 的输出顺序
CONFIG_KEYS: dict[str, str] = {
    "omega_m_hz": "机械振子频率 ω_m/2π [Hz]",
    "kappa1": "腔 1 衰减率 κ₁",
    "kappa2": "腔 2 衰减率 κ₂",
    "gamma": "原子衰减率 γ",
    "gamma_m": "机械阻尼 γ_m",
    "q_m": "机械品质因子 Q_m",
    "delta1": "腔 1 失谐 Δ₁",
    "delta2": "腔 2 裸失谐 Δ₂",
    "delta2_effective": "腔 2 有效失谐 Δ̃₂",
    "omega_atom": "原子失谐 Ω",
    "J": "腔-腔耦合 J",
    "g_a": "单原子-腔耦合 g_a",
    "N": "原子数 N",
    "g": "单光子辐射压耦合 g",
    "epsilon": "驱动强度 |ε|",
    "epsilon_phase": "驱动相位 arg ε [rad]",
    "temperature_k": "环境温度 T [K]",
}

# 互斥的键对
EXCLUSIVE_KEYS = (("gamma_m", "q_m"), ("delta2", "delta2_effective"))


class Delta2Mode(Enum):
    """腔 2 失谐的给定方式"""
    BARE = "bare"            # 给定裸失谐 Δ₂, 稳态求解时自洽计算 Δ̃₂
    EFFECTIVE = "effective"  # 直接给定 Δ̃₂


@dataclass(frozen=True)
class CollectiveCoupling:
    """集体原子-腔耦合 √N·g_a"""
    value: float
    squared: float


@dataclass(frozen=True)
class ValidationReport:
    """参数校验结果"""
    violations: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok" + (f" ({'; '.join(self.notes)})" if self.notes else "")
        return "; ".join(self.violations)


@dataclass(frozen=True)
class SystemParams:
    """模型全部参数

    除 omega_m_hz 与 temperature 外, 所有速率与失谐均以 ω_m 为单位 (ω_m = 1)。
    """
    omega_m_hz: float
    kappa1: float
    kappa2: float
    gamma: float
    gamma_m: float
    delta1: float
    delta2: float
    delta2_mode: Delta2Mode
    omega_atom: float
    J: float
    g_a: float
    N: int
    g: float
    epsilon: float
    temperature: float
    epsilon_phase: float = 0.0
    q_m: float | None = field(default=None, compare=True)

    @property
    def omega_m(self) -> float:
        """机械角频率 [rad/s]"""
        return 2.0 * math.pi * self.omega_m_hz

    @property
    def drive(self) -> complex:
        """复驱动振幅 ε·e^{iφ}"""
        return self.epsilon * complex(math.cos(self.epsilon_phase), math.sin(self.epsilon_phase))

    @property
    def is_effective(self) -> bool:
        return self.delta2_mode is Delta2Mode.EFFECTIVE

    def checked(self) -> "SystemParams":
        """校验参数, 失败时抛出 ValidationError"""
        report = validate(self)
        if not report.ok:
            raise ValidationError(f"参数校验失败: {report}")
        return self


def validate(params: SystemParams) -> ValidationReport:
    """校验参数不变量, 不修改输入

    Returns:
        ValidationReport: violations 为空表示通过
    """
    violations: list[str] = []
    notes: list[str] = []

    for name in ("kappa1", "kappa2", "gamma", "gamma_m"):
        value = getattr(params, name)
        if not math.isfinite(value):
            violations.append(f"{name} 不是有限值")
        elif value < 0:
            violations.append(f"negative decay rate: {name} = {value!r}")
    for name in ("epsilon", "g_a", "J", "g", "temperature"):
        value = getattr(params, name)
        if not math.isfinite(value):
            violations.append(f"{name} 不是有限值")
        elif value < 0:
            violations.append(f"negative {name} = {value!r}")
    for name in ("delta1", "delta2", "omega_atom", "epsilon_phase"):
        if not math.isfinite(getattr(params, name)):
            violations.append(f"{name} 不是有限值")
    if not (math.isfinite(params.omega_m_hz) and params.omega_m_hz > 0):
        violations.append(f"omega_m 必须为正: {params.omega_m_hz!r}")
    if not isinstance(params.N, (int, np.integer)) or isinstance(params.N, bool) or params.N < 0:
        violations.append(f"N 必须为非负整数: {params.N!r}")
    if params.q_m is not None and not params.q_m > 0:
        violations.append(f"q_m 必须为正: {params.q_m!r}")

    if not violations:
        if params.N == 0 or params.g_a == 0:
            notes.append("atomic channel inactive")
        if params.J == 0:
            notes.append("auxiliary cavity decoupled")
    return ValidationReport(tuple(violations), tuple(notes))


def collective_coupling(params: SystemParams) -> CollectiveCoupling:
    """ 集体耦合 √N·g_a 及其平方 N·g_a² """
    value = math.sqrt(params.N) * params.g_a
    return CollectiveCoupling(value=value, squared=value * value)


def gamma_m_from_q(q_m: float) -> float:
    """ γ_m = ω_m / Q_m, ω_m = 1 """
    if not q_m > 0:
        raise ValidationError(f"Q_m 必须为正: {q_m!r}")
    return 1.0 / q_m


def thermal_occupancy(omega_m_si: float, temperature: float) -> float:
    """玻色-爱因斯坦热声子数 n_m = 1/(exp(ħω_m/k_B T) − 1)

    Args:
        omega_m_si: 机械角频率 [rad/s]
        temperature: 温度 [K]
    """
    if not omega_m_si > 0:
        raise ValidationError(f"omega_m 必须为正: {omega_m_si!r}")
    if temperature < 0:
        raise ValidationError(f"温度不能为负: {temperature!r}")
    if temperature == 0:
        return 0.0
    x = hbar * omega_m_si / (Boltzmann * temperature)
    return float(1.0 / np.expm1(x))


def thermal_phonons(params: SystemParams) -> float:
    return thermal_occupancy(params.omega_m, params.temperature)


def default_params() -> SystemParams:
    """ 默认参数组 """
    return _params_from_mapping(dict(DEFAULT_CONFIG))


def _as_float(key: str, value: Any, line: int | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} 需要数值, 得到 {value!r}", line)
    return float(value)


def _as_count(key: str, value: Any, line: int | None = None) -> int:
    number = _as_float(key, value, line)
    if not number.is_integer():
        raise ConfigError(f"{key} 需要整数, 得到 {value!r}", line)
    return int(number)


def _params_from_mapping(mapping: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> SystemParams:
    """由完整的配置字典构造参数并校验"""
    lines = lines or {}

    def num(key: str) -> float:
        return _as_float(key, mapping[key], lines.get(key))

    for a, b in EXCLUSIVE_KEYS:
        if a in mapping and b in mapping:
            if (a, b) == ("gamma_m", "q_m"):
                gamma_m, q_m = num("gamma_m"), num("q_m")
                if q_m > 0 and math.isclose(gamma_m * q_m, 1.0, rel_tol=1e-12, abs_tol=0.0):
                    continue
            raise ConfigError(f"{a} 与 {b} 不能同时给定", lines.get(b, lines.get(a)))

    q_m: float | None = None
    if "q_m" in mapping:
        q_m = num("q_m")
        gamma_m = gamma_m_from_q(q_m) if "gamma_m" not in mapping else num("gamma_m")
    elif "gamma_m" in mapping:
        gamma_m = num("gamma_m")
    else:
        raise ConfigError("缺少 gamma_m 或 q_m")

    if "delta2_effective" in mapping:
        delta2, mode = num("delta2_effective"), Delta2Mode.EFFECTIVE
    elif "delta2" in mapping:
        delta2, mode = num("delta2"), Delta2Mode.BARE
    else:
        raise ConfigError("缺少 delta2 或 delta2_effective")

    params = SystemParams(
        omega_m_hz=num("omega_m_hz"),
        kappa1=num("kappa1"),
        kappa2=num("kappa2"),
        gamma=num("gamma"),
        gamma_m=gamma_m,
        delta1=num("delta1"),
        delta2=delta2,
        delta2_mode=mode,
        omega_atom=num("omega_atom"),
        J=num("J"),
        g_a=num("g_a"),
        N=_as_count("N", mapping["N"], lines.get("N")),
        g=num("g"),
        epsilon=num("epsilon"),
        temperature=num("temperature_k"),
        epsilon_phase=num("epsilon_phase"),
        q_m=q_m,
    )
    return params.checked()


def _merge_with_defaults(explicit: Mapping[str, Any]) -> dict[str, Any]:
    """ 用户给定的键覆盖默认值, 互斥键中未给定的一方被移除 """
    merged = dict(DEFAULT_CONFIG)
    for a, b in EXCLUSIVE_KEYS:
        if a in explicit and b not in explicit:
            merged.pop(b, None)
        elif b in explicit and a not in explicit:
            merged.pop(a, None)
    merged.update(explicit)
    return merged


def _key_lines(text: str) -> dict[str, int]:
    """记录每个键所在的行号, 用于错误信息"""
    lines: dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        match = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=", raw)
        if match:
            lines.setdefault(match.group(1), number)
    return lines


def load_config(text: str) -> SystemParams:
    """解析 key = value 格式的参数文档

    Args:
        text: 配置文本, 每行一个 `key = value`, `#` 开头为注释

    Returns:
        SystemParams: 已校验的参数, 缺失的键使用默认值
    """
    try:
        document = rtoml.loads(text)
    except rtoml.TomlParsingError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ConfigError(f"解析失败: {e}", int(match.group(1)) if match else None) from e

    lines = _key_lines(text)
    for key, value in document.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"未知的配置项: {key}", lines.get(key))
        if isinstance(value, (dict, list)):
            raise ConfigError(f"{key} 需要标量值", lines.get(key))

    params = _params_from_mapping(_merge_with_defaults(document), lines)
    logger.debug(f"加载参数成功: {len(document)} 项显式给定")
    return params


def config_mapping(params: SystemParams) -> dict[str, Any]:
    """参数 -> 配置字典 (配置键名, 规范顺序)"""
    values: dict[str, Any] = {
        "omega_m_hz": params.omega_m_hz,
        "kappa1": params.kappa1,
        "kappa2": params.kappa2,
        "gamma": params.gamma,
    }
    if params.q_m is not None:
        values["q_m"] = params.q_m
    else:
        values["gamma_m"] = params.gamma_m
    values["delta1"] = params.delta1
    values["delta2_effective" if params.is_effective else "delta2"] = params.delta2
    values.update({
        "omega_atom": params.omega_atom,
        "J": params.J,
        "g_a": params.g_a,
        "N": int(params.N),
        "g": params.g,
        "epsilon": params.epsilon,
        "epsilon_phase": params.epsilon_phase,
        "temperature_k": params.temperature,
    })
    return values


def render_config(params: SystemParams) -> str:
    """ 参数 -> 配置文本, load_config 的逆操作 """
    return rtoml.dumps(config_mapping(params))


def with_overrides(params: SystemParams, overrides: Mapping[str, Any]) -> SystemParams:
    """返回覆盖部分配置项后的新参数

    Args:
        params: 原参数
        overrides: 配置键名 -> 新值
    """
    unknown = [key for key in overrides if key not in CONFIG_KEYS]
    if unknown:
        raise ConfigError(f"未知的配置项: {', '.join(unknown)}")
    values = config_mapping(params)
    for a, b in EXCLUSIVE_KEYS:
        if a in overrides and b not in overrides:
            values.pop(b, None)
        elif b in overrides and a not in overrides:
            values.pop(a, None)
    values.update(overrides)
    return _params_from_mapping(values)
