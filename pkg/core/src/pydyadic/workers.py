import logging
from concurrent.futures import ProcessPoolExecutor

logger = logging.getLogger(__name__)


def ensemble_map(func, items, workers=1):
    """
    [func(item) for item in items], optionally spread over worker processes.

    Results always come back in input order, so reductions over them do not
    depend on the number of workers. `func` must be picklable when workers > 1.
    """
    items = list(items)
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    if workers == 1 or len(items) < 2:
        return [func(item) for item in items]
    logger.info("Mapping %d members over %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))
