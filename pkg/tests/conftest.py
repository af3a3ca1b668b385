import pytest
from loguru import logger


@pytest.fixture(autouse=True)
def quiet_logs():
    """Keep loguru output off the test report; CLI runs reconfigure it themselves"""
    logger.remove()
    yield
    logger.remove()
