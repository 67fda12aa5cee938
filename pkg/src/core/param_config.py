from pathlib import Path
from typing import Any

import rtoml
from loguru import logger

from .errors import ConfigError
from .params import SystemParams, default_params, load_config, render_config, with_overrides


def parse_override(item: str) -> tuple[str, Any]:
    """解析 --set key=value

    Returns:
        tuple[str, Any]: (键, 按 TOML 标量解析后的值)
    """
    key, sep, raw = item.partition("=")
    key, raw = key.strip(), raw.strip()
    if not sep or not key or not raw:
        raise ConfigError(f"无效的覆盖项: {item!r}, 需要 key=value")
    try:
        value = rtoml.loads(f"v = {raw}")["v"]
    except rtoml.TomlParsingError as e:
        raise ConfigError(f"无效的覆盖值 {key}={raw!r}: {e}") from e
    return key, value


class ParamConfig:
    """文件参数配置: 加载文件、应用覆盖项、保存"""

    def __init__(self, config_path: str = "", overrides: list[str] | None = None):
        self.__config_file: Path | None = Path(config_path) if config_path else None

        # 按解析顺序保存覆盖项, 用于运行头部回显
        self.overrides: list[tuple[str, Any]] = [parse_override(item) for item in overrides or []]
        self.params: SystemParams = default_params()

        self.load_config()

    def load_config(self) -> None:
        """从文件加载参数, 文件缺省时使用默认值, 然后应用覆盖项"""
        if self.__config_file is not None:
            if not self.__config_file.exists():
                raise ConfigError(f"配置文件不存在: {self.__config_file}")
            text = self.__config_file.read_text(encoding="utf-8")
            self.params = load_config(text)
            logger.debug(f"加载配置成功: {self.__config_file}")
        if self.overrides:
            self.params = with_overrides(self.params, dict(self.overrides))

    def save_config(self, path: str | Path) -> Path:
        """保存当前参数到文件"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_config(self.params), encoding="utf-8")
        logger.debug(f"保存配置成功: {path}")
        return path

    def describe_overrides(self) -> str:
        """ 覆盖项回显, 值按解析结果原样输出 """
        return ", ".join(f"{key}={value!r}" for key, value in self.overrides)

    def get_config_path(self) -> Path | None:
        """获取配置文件路径"""
        return self.__config_file
