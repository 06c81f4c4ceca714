import logging
from multiprocessing.dummy import Pool
from typing import Callable, List, Sequence, TypeVar

import tqdm

from glc.logger_utils import TqdmLoggingHandler

THREAD_COUNT = 5

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

Item = TypeVar("Item")
Result = TypeVar("Result")


class ThreadedRunner:
    """
    Maps a function over independent work items on a thread pool. Results keep the
    order of submission
    """

    def __init__(
        self,
        progress_bars: bool = False,
        progress_desc: str = None,
        threads: int = THREAD_COUNT,
    ):
        self._progress_bars = progress_bars
        self._progress_desc = progress_desc
        self._threads = max(1, threads)

    def map(self, fn: Callable[[Item], Result], items: Sequence[Item]) -> List[Result]:
        if self._threads == 1:
            return [
                fn(item)
                for item in tqdm.tqdm(
                    items,
                    ascii=True,
                    desc=self._progress_desc,
                    disable=not self._progress_bars,
                    leave=False,
                )
            ]

        pool = Pool(self._threads)
        try:
            results = tqdm.tqdm(
                pool.imap(fn, items),
                ascii=True,
                desc=self._progress_desc,
                disable=not self._progress_bars,
                position=0,
                leave=False,
                total=len(items),
            )
            outputs = list(results)
        finally:
            pool.close()
            pool.join()

        logger.debug("Ran %i items on %i threads", len(outputs), self._threads)
        return outputs
