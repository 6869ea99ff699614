import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

from config.settings import RunConfig, settings

logger = logging.getLogger(__name__)


def setup_logging(level: Optional[str] = None) -> None:
    """按 settings 配置根 logger"""
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format=settings.LOG_FORMAT,
        force=True,
    )


@contextmanager
def experiment(command: str, config: RunConfig, write_config: bool = True) -> Iterator[Path]:
    """
    一次实验的生命周期：创建输出目录、写入配置副本、记录起止

    Yields:
        输出目录
    """
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if write_config:
        config.write(out_dir)
    logger.info(f"{command} started - 环境: {settings.ENVIRONMENT}, 输出: {out_dir}")
    started = time.perf_counter()

    yield out_dir

    logger.info(f"{command} finished in {time.perf_counter() - started:.1f}s")
