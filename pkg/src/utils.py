import os
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from .const import THREADS_ENV


def format_sig(value: float | complex | None) -> str:
    """ 以 17 位有效数字格式化数值, None 输出空字段 """
    if value is None:
        return ""
    if isinstance(value, complex):
        return f"{value.real:.17g},{value.imag:.17g}"
    return f"{float(value):.17g}"


def format_time(duration: float):
    """ 格式化时间 """
    hour = int(duration // 3600)
    minute = int((duration % 3600) // 60)
    second = duration % 60
    return f'{hour:02d}:{minute:02d}:{second:06.3f}'


def resolve_threads(flag: int | None = None) -> int:
    """获取并行线程数

    Args:
        flag: 命令行 --threads 的值, 优先级最高

    Returns:
        int: 线程数 (>= 1)
    """
    if flag is not None:
        return max(1, int(flag))
    env = os.environ.get(THREADS_ENV, "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning(f"忽略无效的环境变量 {THREADS_ENV}={env!r}")
    return os.cpu_count() or 1


def relative_error(a: np.ndarray | float, b: np.ndarray | float) -> np.ndarray | float:
    """ 相对误差 |a-b| / max(|a|, |b|, tiny) """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.finfo(float).tiny)
    return np.abs(a - b) / scale


def write_table(table: pd.DataFrame, path: str | Path | None = None) -> str:
    """以 17 位有效数字写出 CSV (LF 换行, 空值为空字段)

    Args:
        table: 数据表
        path: 输出路径, 为 None 时只返回文本

    Returns:
        str: CSV 文本
    """
    text = table.to_csv(index=False, float_format="%.17g", na_rep="", lineterminator="\n")
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(text.encode("utf-8"))
        logger.debug(f"写出表格: {path} ({len(table)} 行)")
    return text
