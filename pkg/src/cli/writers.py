import sys
from pathlib import Path
from typing import Any, Mapping

import pandas as pd
from loguru import logger

from ..core.cooling import CoolingSummary, approximate_final_occupancy
from ..core.steady_state import BranchSet
from ..utils import format_sig, write_table

STEADY_COLUMNS = (
    "branch",
    "re_a1", "im_a1",
    "re_a2", "im_a2",
    "re_b", "im_b",
    "re_sigma_ge", "im_sigma_ge",
    "delta2_eff", "G", "residual",
)


def emit(text: str, path: str | Path | None = None) -> None:
    """写到文件, 未给定路径时写到标准输出"""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    logger.info(f"已写出: {path}")


def key_value_lines(values: Mapping[str, Any]) -> str:
    """ 每行一个 `key = value`, 数值为 17 位有效数字, 缺失值为空 """
    lines = []
    for key, value in values.items():
        if isinstance(value, bool):
            text = "true" if value else "false"
        else:
            text = format_sig(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def steady_table(branches: BranchSet) -> pd.DataFrame:
    rows = []
    for index, ss in enumerate(branches.solutions):
        rows.append((
            index,
            ss.a1.real, ss.a1.imag,
            ss.a2.real, ss.a2.imag,
            ss.b.real, ss.b.imag,
            ss.sigma_ge.real, ss.sigma_ge.imag,
            ss.delta2_eff, ss.G, ss.residual,
        ))
    return pd.DataFrame(rows, columns=list(STEADY_COLUMNS))


def steady_text(branches: BranchSet) -> str:
    return write_table(steady_table(branches))


def cooling_text(summary: CoolingSummary) -> str:
    return key_value_lines({
        "s_plus": summary.s_plus,
        "s_minus": summary.s_minus,
        "G": summary.G,
        "gamma_m": summary.gamma_m,
        "n_m": summary.n_m,
        "gamma_c": summary.gamma_c,
        "n_c": summary.n_c,
        "n_f": summary.n_f,
        "n_f_approx": approximate_final_occupancy(summary),
        "a_down": summary.a_down,
        "a_up": summary.a_up,
        "heating_dominated": summary.heating_dominated,
    })
