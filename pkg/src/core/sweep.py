import multiprocessing
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from .cooling import cool_operating_point
from .errors import EmptySweep, OptocoolError, ValidationError
from .params import CONFIG_KEYS, SystemParams, with_overrides
from .spectrum import force_spectrum, frequency_grid
from .steady_state import select_branch, solve_steady_state

SWEEP_OUTPUTS = ("spectrum", "G", "gamma_c", "n_c", "n_f")
# 不能作为扫描轴的配置键
FIXED_KEYS = ("delta2", "delta2_effective", "q_m")


@dataclass(frozen=True)
class SweepSpec:
    """单参数扫描"""
    axis: str
    values: tuple[float, ...]
    base: SystemParams
    outputs: tuple[str, ...] = field(default=SWEEP_OUTPUTS)

    def __post_init__(self) -> None:
        if self.axis not in CONFIG_KEYS or self.axis in FIXED_KEYS:
            raise ValidationError(f"不支持的扫描轴: {self.axis}")
        if not self.values:
            raise EmptySweep("扫描网格为空")
        steps = np.diff(np.asarray(self.values, dtype=float))
        if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValidationError(f"扫描网格必须严格单调: {self.axis}")
        unknown = [name for name in self.outputs if name not in SWEEP_OUTPUTS]
        if unknown:
            raise ValidationError(f"未知的扫描输出: {', '.join(unknown)}")


def _output_columns(spec: SweepSpec) -> list[str]:
    columns = [spec.axis]
    if "G" in spec.outputs:
        columns.append("G")
    if "spectrum" in spec.outputs:
        columns += ["s_plus", "s_minus"]
    for name in ("gamma_c", "n_c", "n_f"):
        if name in spec.outputs:
            columns.append(name)
    return columns + ["heating_dominated", "error"]


def _sweep_row(task: tuple[SystemParams, str, float, int | None]) -> dict[str, Any]:
    """计算单行, 错误记录在 error 列中"""
    base, axis, value, branch = task
    row: dict[str, Any] = {axis: value}
    try:
        params = with_overrides(base, {axis: value})
        ss, summary = cool_operating_point(params, branch)
        row.update(
            G=ss.G,
            s_plus=summary.s_plus,
            s_minus=summary.s_minus,
            gamma_c=summary.gamma_c,
            n_c=summary.n_c,
            n_f=summary.n_f,
            heating_dominated=summary.heating_dominated,
            error="",
        )
    except OptocoolError as e:
        row["error"] = f"{type(e).__name__}: {e}"
    return row


def _map_rows(tasks: list, worker, threads: int) -> list:
    """按网格顺序返回结果, 与并行度无关"""
    if threads <= 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    with multiprocessing.Pool(processes=min(threads, len(tasks))) as pool:
        return pool.map(worker, tasks)


def run_sweep(spec: SweepSpec, threads: int = 1, branch: int | None = None) -> pd.DataFrame:
    """沿单个参数轴扫描, 每个点重新求解稳态、吸收谱与冷却

    Returns:
        pd.DataFrame: 每个网格值一行; 出错或加热占优的行中无效量为空
    """
    tasks = [(spec.base, spec.axis, float(value), branch) for value in spec.values]
    rows = _map_rows(tasks, _sweep_row, threads)

    table = pd.DataFrame(rows, columns=_output_columns(spec))
    failed = int((table["error"] != "").sum())
    heating = int(table["heating_dominated"].eq(True).sum())
    if failed:
        logger.warning(f"扫描 {spec.axis}: {failed} 行计算失败")
    if heating:
        logger.warning(f"扫描 {spec.axis}: {heating} 行加热占优")
    logger.debug(f"扫描 {spec.axis} 完成: {len(table)} 行")
    return table


def sweep_coupling(spec: SweepSpec, threads: int = 1, branch: int | None = None) -> pd.DataFrame:
    """腔-腔耦合 J 扫描"""
    if spec.axis != "J":
        raise ValidationError(f"sweep_coupling 需要 J 轴, 得到 {spec.axis}")
    return run_sweep(spec, threads, branch)


def configuration_label(overrides: dict[str, Any]) -> str:
    """ 列名, 例如 s_ff[J=1,g_a=0.1] """
    inner = ",".join(f"{key}={value!r}" for key, value in overrides.items())
    return f"s_ff[{inner}]"


def _spectrum_column(task: tuple[SystemParams, dict[str, Any], np.ndarray, int | None]) -> np.ndarray:
    base, overrides, grid, branch = task
    try:
        params = with_overrides(base, overrides)
        ss = select_branch(solve_steady_state(params), branch)
        return np.asarray(force_spectrum(grid, params, ss.delta2_eff), dtype=float)
    except OptocoolError as e:
        logger.warning(f"配置 {overrides} 吸收谱计算失败: {e}")
        return np.full(grid.shape, np.nan)


def sweep_spectrum(base: SystemParams, configurations: Sequence[dict[str, Any]],
                   grid: np.ndarray | None = None, threads: int = 1,
                   branch: int | None = None) -> pd.DataFrame:
    """多组配置在同一频率网格上的吸收谱, 每组一列"""
    if not configurations:
        raise EmptySweep("配置列表为空")
    omega = frequency_grid() if grid is None else np.asarray(grid, dtype=float)
    tasks = [(base, dict(overrides), omega, branch) for overrides in configurations]
    columns = _map_rows(tasks, _spectrum_column, threads)

    table = pd.DataFrame({"omega_over_omega_m": omega})
    for overrides, values in zip(configurations, columns):
        table[configuration_label(dict(overrides))] = values
    return table
