from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from loguru import logger

from config import app_settings


class EnsembleRunner:
    """
    Runs independent walk tasks, serially or on a process pool.

    Every task carries its own key and seeds its own stream, so results are
    returned sorted by key and do not depend on the worker count.
    """

    def __init__(self, threads: Optional[int] = None):
        self.threads = max(1, threads or app_settings.RANCHER_THREADS)
        logger.info(f"Initialized EnsembleRunner with {self.threads} worker(s)")

    def map(
            self,
            fn: Callable[..., Any],
            tasks: Sequence[Tuple[Hashable, Dict[str, Any]]]
    ) -> List[Tuple[Hashable, Any]]:
        """Apply fn(**kwargs) to every (key, kwargs) task; results sorted by key"""
        if not tasks:
            return []

        logger.info(f"Running {len(tasks)} task(s) on {self.threads} worker(s)")
        keys = [key for key, _ in tasks]
        if len(set(keys)) != len(keys):
            raise ValueError("Ensemble task keys must be unique")

        try:
            if self.threads == 1 or len(tasks) == 1:
                results = [fn(**kwargs) for _, kwargs in tasks]
            else:
                with ProcessPoolExecutor(max_workers=self.threads) as pool:
                    futures = [pool.submit(fn, **kwargs) for _, kwargs in tasks]
                    results = [future.result() for future in futures]
        except Exception as e:
            logger.error(f"Ensemble run failed: {e}")
            raise

        return sorted(zip(keys, results), key=lambda item: item[0])
