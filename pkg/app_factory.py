import argparse
from typing import Callable, Dict, List, Optional

from config.settings import settings

# 公共参数：命令行名称 -> (RunConfig 字段, 类型, 说明)
RUN_ARGUMENTS = {
    "--config": ("config", str, "key=value 配置文件（命令行参数优先）"),
    "--data": ("data", str, "数据集 CSV/JSON"),
    "--schema": ("schema_path", str, "特征名 JSON"),
    "--out": ("out", str, "输出目录"),
    "--seed": ("seed", int, "主随机种子"),
    "--generations": ("generations", int, "训练代数"),
    "--population": ("population", int, "种群规模"),
    "--cash": ("cash", float, "每个市场的初始资金"),
    "--liquidity": ("liquidity", float, "LMSR 流动性参数 b"),
    "--initial-price": ("initial_price", float, "Yes 初始价格"),
    "--folds": ("folds", int, "交叉验证折数"),
    "--jobs": ("jobs", int, "并行度，-1 表示全部 CPU"),
    "--model": ("model", str, "已训练模型 JSON"),
    "--claim": ("claim", str, "claim id"),
    "--scores": ("scores", str, "scores.json 路径"),
}


class CommandFactory:
    """子命令工厂类"""

    def __init__(self):
        self.commands: Dict[str, Dict] = {}

    def register_command(
        self,
        name: str,
        handler: Callable,
        description: str,
        arguments: Optional[List[str]] = None,
    ):
        """注册子命令"""
        if name in self.commands:
            raise ValueError(f"命令 '{name}' 已注册")
        self.commands[name] = {
            "handler": handler,
            "description": description,
            "arguments": arguments if arguments is not None else list(RUN_ARGUMENTS),
        }

    def get_handler(self, name: str) -> Callable:
        if name not in self.commands:
            raise ValueError(f"命令 '{name}' 未注册")
        return self.commands[name]["handler"]

    def create_parser(self) -> argparse.ArgumentParser:
        """创建命令行解析器"""
        parser = argparse.ArgumentParser(
            prog="replication-market",
            description=f"{settings.PROJECT_NAME} {settings.VERSION}",
        )
        subparsers = parser.add_subparsers(dest="command", required=True)
        for name, command in self.commands.items():
            sub = subparsers.add_parser(name, help=command["description"])
            for flag in command["arguments"]:
                dest, kind, help_text = RUN_ARGUMENTS[flag]
                sub.add_argument(flag, dest=dest, type=kind, default=None, help=help_text)
        return parser


def run_overrides(namespace: argparse.Namespace) -> Dict:
    """解析结果 -> RunConfig 覆盖项（不含 --config）"""
    values = vars(namespace)
    return {
        dest: values.get(dest)
        for dest, _, _ in RUN_ARGUMENTS.values()
        if dest != "config"
    }


# 工厂实例
command_factory = CommandFactory()


def get_command_factory() -> CommandFactory:
    """获取命令工厂实例"""
    return command_factory
