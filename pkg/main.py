import argparse
import sys

from loguru import logger

from src.cli.commands import EXIT_VALIDATION, SUBCOMMANDS, Command, run
from src.const import APP_KAY


def parse_args(argv: list[str] | None = None):
    parser = argparse.ArgumentParser(prog=APP_KAY, description="混合光力系统中 NAMR 基态冷却的数值模拟")
    parser.add_argument("subcommand", type=str, help=f"子命令: {', '.join(SUBCOMMANDS)}")
    parser.add_argument("--config", type=str, default='', help="参数文件路径")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="覆盖参数, 可重复")
    parser.add_argument("--out", type=str, default=None, help="输出文件 (sweep --figure 时为目录)")
    parser.add_argument("--threads", type=int, default=None, help="扫描并行度")
    parser.add_argument("--debug", action="store_true", help="调试模式")

    parser.add_argument("--branch", type=int, default=None, help="稳态分支序号 (默认光强最小)")
    parser.add_argument("--omega-min", type=float, default=None, help="频率网格下限 [ω_m]")
    parser.add_argument("--omega-max", type=float, default=None, help="频率网格上限 [ω_m]")
    parser.add_argument("--points", type=int, default=None, help="频率网格点数")
    parser.add_argument("--t-final", type=float, default=None, help="演化终止时刻 [1/ω_m]")
    parser.add_argument("--samples", type=int, default=None, help="演化采样点数")
    parser.add_argument("--n-max", type=int, default=None, help="声子数截断")
    parser.add_argument("--figure", type=str, default=None, help="复现的图: fig2, fig3, fig5")
    parser.add_argument("--axis", type=str, default=None, help="扫描参数")
    parser.add_argument("--start", type=float, default=None, help="扫描起点")
    parser.add_argument("--stop", type=float, default=None, help="扫描终点")
    parser.add_argument("--num", type=int, default=None, help="扫描点数")
    args, unknown = parser.parse_known_args(argv)  # 解包返回的元组
    if unknown:
        logger.warning(f"忽略未知参数: {unknown}")
    return args


def build_command(args) -> Command:
    """命令行参数 -> Command, 未给定的选项保留默认值"""
    command = Command(
        subcommand=args.subcommand,
        config_path=args.config,
        overrides=list(args.overrides),
        output_path=args.out,
        threads=args.threads,
        branch=args.branch,
        t_final=args.t_final,
        n_max=args.n_max,
        figure=args.figure,
        axis=args.axis,
        start=args.start,
        stop=args.stop,
        num=args.num,
    )
    for name in ("omega_min", "omega_max", "points", "samples"):
        value = getattr(args, name)
        if value is not None:
            setattr(command, name, value)
    return command


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as e:
        # argparse 的用法错误统一映射为校验错误
        return EXIT_VALIDATION if e.code else 0

    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if args.debug else "INFO")
    return run(build_command(args))


if __name__ == '__main__':
    sys.exit(main())
