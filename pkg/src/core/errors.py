class OptocoolError(Exception):
    """所有业务异常的基类, exit_code 对应命令行退出码"""
    exit_code: int = 3


class ValidationError(OptocoolError):
    """参数校验或输入错误"""
    exit_code = 1


class ConfigError(ValidationError):
    """配置文件解析错误"""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        prefix = f"第 {line} 行: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class UnknownFigure(ValidationError):
    pass


class EmptySweep(ValidationError):
    pass


class RuntimeFailure(OptocoolError):
    """计算过程中的运行时错误 (极点、截断溢出等)"""
    exit_code = 2


class PoleAtGrid(RuntimeFailure):
    pass


class SingularMatrix(RuntimeFailure):
    pass


class Degenerate(RuntimeFailure):
    pass


class InfeasibleDetuning(RuntimeFailure):
    pass


class TruncationOverflow(RuntimeFailure):
    pass


class Unstable(RuntimeFailure):
    pass


class IntegrationFailure(RuntimeFailure):
    pass


class InvariantBreach(OptocoolError):
    """内部不变量被破坏"""
    exit_code = 3


class NoPhysicalRoot(InvariantBreach):
    pass
