from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd
from loguru import logger

from ..utils import write_table
from .errors import UnknownFigure
from .params import SystemParams, default_params, with_overrides
from .sweep import SweepSpec, run_sweep, sweep_spectrum


@dataclass(frozen=True)
class FigurePanel:
    """图中的一个面板: 一组基础覆盖项和若干条曲线"""
    name: str
    base: dict[str, Any]
    curves: tuple[dict[str, Any], ...]


# 各图参数, 取自图注
FIGURE_PANELS: dict[str, tuple[FigurePanel, ...]] = {
    "fig2": (
        FigurePanel("fig2", {}, (
            {"J": 0.0, "g_a": 0.0},
            {"J": 1.0, "g_a": 0.0},
            {"J": 0.0, "g_a": 0.1},
            {"J": 1.0, "g_a": 0.1},
        )),
    ),
    "fig3": (
        FigurePanel("fig3", {
            "g_a": 0.1, "N": 200, "gamma": 0.1, "kappa2": 3.0, "delta2_effective": -0.1,
            "delta1": -1.0, "omega_atom": -1.0, "J": 0.45,
        }, (
            {"kappa1": 0.1},
            {"kappa1": 1.0},
            {"kappa1": 3.0},
        )),
    ),
    "fig5": tuple(
        FigurePanel(f"fig5{panel}", {
            "kappa1": kappa1, "kappa2": 3.0, "gamma": 0.1, "g_a": 0.1,
            "delta2_effective": -1.0, "omega_atom": -1.0, "delta1": -1.0,
        }, ({"N": 0}, {"N": 100}))
        for panel, kappa1 in (("a", 0.1), ("b", 2.0))
    ),
}

FIG5_J_GRID = np.linspace(0.0, 3.0, 301)


def figure_panels(figure_id: str) -> tuple[FigurePanel, ...]:
    if figure_id not in FIGURE_PANELS:
        raise UnknownFigure(f"未知的图: {figure_id}, 可选 {', '.join(FIGURE_PANELS)}")
    return FIGURE_PANELS[figure_id]


def panel_params(panel: FigurePanel, curve: dict[str, Any], base: SystemParams | None = None) -> SystemParams:
    """ 面板基础参数叠加单条曲线的覆盖项 """
    params = with_overrides(base or default_params(), panel.base)
    return with_overrides(params, curve)


def _curve_title(curve: dict[str, Any]) -> str:
    return ", ".join(f"{key}={value!r}" for key, value in curve.items())


class FigureScript(ABC):
    """gnuplot 脚本生成器抽象基类"""

    def __init__(self, figure_id: str) -> None:
        self.figure_id = figure_id
        self.panels = figure_panels(figure_id)

    def header(self) -> list[str]:
        return [
            f"# {self.figure_id}: generated by optocool",
            'set datafile separator ","',
            "set terminal pngcairo size 900,600",
            f"set output '{self.figure_id}.png'",
        ]

    @abstractmethod
    def render(self, data_files: dict[str, str]) -> str:
        """生成脚本文本

        Args:
            data_files: 面板名 -> 相对路径的 CSV 文件名

        Returns:
            脚本文本, 相同输入逐字节一致
        """
        pass


class SpectrumFigureScript(FigureScript):
    """吸收谱叠加图 (fig2, fig3)"""

    def render(self, data_files: dict[str, str]) -> str:
        panel = self.panels[0]
        lines = self.header() + [
            "set xlabel 'omega / omega_m'",
            "set ylabel 'S_FF(omega) * omega_m'",
            "set xrange [-4:4]",
        ]
        series = [
            f"'{data_files[panel.name]}' using 1:{column} with lines title '{_curve_title(curve)}'"
            for column, curve in enumerate(panel.curves, start=2)
        ]
        lines.append("plot " + ", \\\n     ".join(series))
        return "\n".join(lines) + "\n"


class PhononFigureScript(FigureScript):
    """声子数随 J 变化 (fig5), 每个面板 n_c 与 n_f 两条曲线, 纯光力 (N=0) 为虚线"""

    def render(self, data_files: dict[str, str]) -> str:
        lines = self.header() + [
            f"set multiplot layout 1,{len(self.panels)}",
            "set xlabel 'J / omega_m'",
            "set ylabel 'phonon number'",
            "set logscale y",
        ]
        for panel in self.panels:
            lines.append(f"set title '{panel.name} ({_curve_title(panel.base)})'")
            series = []
            for curve in panel.curves:
                name = f"{panel.name}_{_curve_title(curve).replace('=', '')}"
                dash = "dt 2" if curve.get("N", 0) == 0 else "dt 1"
                series.append(f"'{data_files[name]}' using 1:'n_c' with lines lc 'black' {dash} title 'n_c {_curve_title(curve)}'")
                series.append(f"'{data_files[name]}' using 1:'n_f' with lines lc 'red' {dash} title 'n_f {_curve_title(curve)}'")
            lines.append("plot " + ", \\\n     ".join(series))
        lines.append("unset multiplot")
        return "\n".join(lines) + "\n"


class FigureScriptFactory:
    """根据图编号创建脚本生成器"""

    @staticmethod
    def create(figure_id: str) -> Optional[FigureScript]:
        if figure_id in ("fig2", "fig3"):
            return SpectrumFigureScript(figure_id)
        if figure_id == "fig5":
            return PhononFigureScript(figure_id)
        raise UnknownFigure(f"未知的图: {figure_id}, 可选 {', '.join(FIGURE_PANELS)}")


def emit_plot_script(figure_id: str, data_files: dict[str, str]) -> str:
    """ 生成 gnuplot 脚本, 以相对路径引用 CSV """
    return FigureScriptFactory.create(figure_id).render(data_files)


def figure_tables(figure_id: str, base: SystemParams | None = None, threads: int = 1,
                  grid: np.ndarray | None = None, j_values: np.ndarray | None = None) -> dict[str, pd.DataFrame]:
    """计算图数据表

    Returns:
        dict[str, pd.DataFrame]: 数据文件名 (不含扩展名) -> 表
    """
    tables: dict[str, pd.DataFrame] = {}
    for panel in figure_panels(figure_id):
        panel_base = with_overrides(base or default_params(), panel.base)
        if figure_id == "fig5":
            for curve in panel.curves:
                spec = SweepSpec(
                    axis="J",
                    values=tuple(float(j) for j in (FIG5_J_GRID if j_values is None else j_values)),
                    base=with_overrides(panel_base, curve),
                )
                tables[f"{panel.name}_{_curve_title(curve).replace('=', '')}"] = run_sweep(spec, threads)
        else:
            tables[panel.name] = sweep_spectrum(panel_base, panel.curves, grid, threads)
    return tables


def reproduce_figure(figure_id: str, out_dir: str | Path, base: SystemParams | None = None,
                     threads: int = 1, grid: np.ndarray | None = None,
                     j_values: np.ndarray | None = None) -> list[Path]:
    """写出图数据 CSV 与 gnuplot 脚本

    Returns:
        list[Path]: 写出的文件
    """
    tables = figure_tables(figure_id, base, threads, grid, j_values)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written: list[Path] = []
    data_files: dict[str, str] = {}
    for name, table in tables.items():
        path = out_dir / f"{name}.csv"
        write_table(table, path)
        data_files[name] = path.name
        written.append(path)
    script = out_dir / f"{figure_id}.gp"
    script.write_bytes(emit_plot_script(figure_id, data_files).encode("utf-8"))
    written.append(script)
    logger.info(f"{figure_id} 已写出 {len(written)} 个文件到 {out_dir}")
    return written
