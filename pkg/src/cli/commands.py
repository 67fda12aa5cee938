import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd
from loguru import logger

from ..const import APP_KAY, OMEGA_MAX, OMEGA_MIN, OMEGA_POINTS
from ..core.cooling import cool_operating_point, evolve_trajectory, ground_state_population, mean_phonon, thermal_distribution
from ..core.errors import OptocoolError, Unstable, ValidationError
from ..core.figures import reproduce_figure
from ..core.param_config import ParamConfig
from ..core.self_check import self_check
from ..core.spectrum import SpectrumMethod, frequency_grid, spectrum_curve
from ..core.steady_state import select_branch, solve_steady_state, weak_coupling_validity
from ..core.sweep import SweepSpec, run_sweep
from ..utils import format_time, resolve_threads, write_table
from .writers import cooling_text, emit, steady_text

SUBCOMMANDS = ("steady", "spectrum", "cool", "evolve", "sweep", "check")

USAGE = (
    f"usage: {APP_KAY} {{{','.join(SUBCOMMANDS)}}} "
    "[--config PATH] [--set key=value]... [--out PATH] [--threads N] [--debug]"
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_INTERNAL = 3

# evolve 默认积分到 40 个弛豫时间 1/(a_down − a_up)
RELAXATION_TIMES = 40.0


@dataclass
class Command:
    """一次命令行调用"""
    subcommand: str
    config_path: str = ""
    overrides: list[str] = field(default_factory=list)
    output_path: str | None = None
    threads: int | None = None

    # steady / cool / spectrum / evolve
    branch: int | None = None
    # spectrum
    omega_min: float = OMEGA_MIN
    omega_max: float = OMEGA_MAX
    points: int = OMEGA_POINTS
    # evolve
    t_final: float | None = None
    samples: int = 101
    n_max: int | None = None
    # sweep
    figure: str | None = None
    axis: str | None = None
    start: float | None = None
    stop: float | None = None
    num: int | None = None


def _run_steady(command: Command, config: ParamConfig) -> int:
    branches = solve_steady_state(config.params)
    chosen = select_branch(branches, command.branch)
    logger.info(f"稳态分支 {len(branches)} 个, G = {chosen.G:.6g}, Δ̃₂ = {chosen.delta2_eff:.6g}")
    weak_coupling_validity(chosen, config.params)
    emit(steady_text(branches), command.output_path)
    return EXIT_OK


def _run_spectrum(command: Command, config: ParamConfig) -> int:
    ss = select_branch(solve_steady_state(config.params), command.branch)
    grid = frequency_grid(command.omega_min, command.omega_max, command.points)
    closed = spectrum_curve(config.params, ss.delta2_eff, grid)
    oracle = spectrum_curve(config.params, ss.delta2_eff, grid, SpectrumMethod.MATRIX_ORACLE)
    table = pd.DataFrame({
        "omega_over_omega_m": closed.omega,
        "s_ff": closed.s_ff,
        "s_ff_oracle": oracle.s_ff,
    })
    emit(write_table(table), command.output_path)
    return EXIT_OK


def _run_cool(command: Command, config: ParamConfig) -> int:
    ss, summary = cool_operating_point(config.params, command.branch)
    weak_coupling_validity(ss, config.params)
    if summary.n_f is not None:
        logger.info(f"n_c = {summary.n_c:.6g}, n_f = {summary.n_f:.6g}")
    emit(cooling_text(summary), command.output_path)
    return EXIT_OK


def _run_evolve(command: Command, config: ParamConfig) -> int:
    _, summary = cool_operating_point(config.params, command.branch)
    if not summary.stable:
        raise Unstable(f"a_up = {summary.a_up:.6g} ≥ a_down = {summary.a_down:.6g}, 声子数无稳态")
    initial = thermal_distribution(summary.n_m, command.n_max)
    t_final = command.t_final
    if t_final is None:
        t_final = RELAXATION_TIMES / (summary.a_down - summary.a_up)
    logger.info(f"速率方程: N_max = {initial.n_max}, t_final = {t_final:.6g}/ω_m, {command.samples} 个采样点")

    trajectory = evolve_trajectory(initial, summary, t_final, command.samples)
    table = pd.DataFrame({
        "time_omega_m": [dist.time for dist in trajectory],
        "mean_phonon": [mean_phonon(dist) for dist in trajectory],
        "ground_state_population": [ground_state_population(dist) for dist in trajectory],
    })
    emit(write_table(table), command.output_path)
    return EXIT_OK


def _run_sweep(command: Command, config: ParamConfig) -> int:
    threads = resolve_threads(command.threads)
    if command.figure is not None:
        out_dir = Path(command.output_path or command.figure)
        reproduce_figure(command.figure, out_dir, config.params, threads)
        config.save_config(out_dir / "params.toml")
        return EXIT_OK

    if command.axis is None or command.start is None or command.stop is None or command.num is None:
        raise ValidationError("sweep 需要 --figure, 或同时给定 --axis --start --stop --num")
    if command.num < 1:
        raise ValidationError(f"--num 必须为正: {command.num}")
    values = tuple(float(v) for v in np.linspace(command.start, command.stop, command.num))
    table = run_sweep(SweepSpec(axis=command.axis, values=values, base=config.params), threads, command.branch)
    emit(write_table(table), command.output_path)
    return EXIT_OK


def _run_check(command: Command, config: ParamConfig) -> int:
    report = self_check()
    failed = [result.name for result in report.results if not result.passed]
    if failed:
        logger.error(f"自检失败: {', '.join(failed)}")
        return EXIT_INTERNAL
    logger.info(f"自检全部通过 ({len(report.results)} 项)")
    return EXIT_OK


HANDLERS: dict[str, Callable[[Command, ParamConfig], int]] = {
    "steady": _run_steady,
    "spectrum": _run_spectrum,
    "cool": _run_cool,
    "evolve": _run_evolve,
    "sweep": _run_sweep,
    "check": _run_check,
}


def run(command: Command) -> int:
    """执行一个子命令

    Returns:
        int: 退出码, 0 成功, 1 校验错误, 2 运行时错误, 3 内部不变量被破坏
    """
    handler = HANDLERS.get(command.subcommand)
    if handler is None:
        logger.error(f"未知的子命令: {command.subcommand!r}")
        logger.error(USAGE)
        return EXIT_VALIDATION

    start = time.perf_counter()
    try:
        config = ParamConfig(command.config_path, command.overrides)
        logger.info(
            f"{APP_KAY} {command.subcommand}: 配置 {config.get_config_path() or '默认'}, "
            f"覆盖 {config.describe_overrides() or '无'}"
        )
        code = handler(command, config)
    except OptocoolError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"内部错误: {e}")
        return EXIT_INTERNAL
    logger.info(f"{command.subcommand} 完成, 用时 {format_time(time.perf_counter() - start)}")
    return code
