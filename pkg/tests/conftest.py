import pytest
from loguru import logger


@pytest.fixture(autouse=True)
def detach_log_sinks():
    """main() 会把 sink 绑定到当前 stderr, 测试结束后移除"""
    yield
    logger.remove()
