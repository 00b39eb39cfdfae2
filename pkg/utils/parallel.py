"""Parallel processing utilities for efficient computation."""

import multiprocessing as mp
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Any, Optional, Sequence
from functools import partial
from tqdm import tqdm
from core import get_logger

logger = get_logger(__name__)


class ThreadPool:
    """Thread-based parallel executor.

    numpy releases the GIL inside RNG fills and matrix products, which is
    where MC sampling spends its time.
    """

    def __init__(self, max_workers: Optional[int] = None):
        """Initialize thread pool.

        Args:
            max_workers: Maximum number of worker threads
        """
        self.max_workers = max_workers or mp.cpu_count()

    def map(self, func: Callable, items: Sequence,
            show_progress: bool = False,
            desc: Optional[str] = None,
            **kwargs) -> List[Any]:
        """Execute function in parallel using threads.

        Results are returned in input order regardless of completion order.
        """
        if kwargs:
            func = partial(func, **kwargs)
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            results = executor.map(func, items)
            if show_progress:
                results = tqdm(results, total=len(items), desc=desc, leave=False)
            return list(results)


def parallel_map(func: Callable,
                 items: Sequence,
                 n_jobs: int = 1,
                 show_progress: bool = False,
                 desc: Optional[str] = None,
                 **kwargs) -> List[Any]:
    """High-level ordered parallel map.

    Args:
        func: Function to execute
        items: Inputs, one call each
        n_jobs: Number of worker threads (1 runs inline, -1 for all CPUs)
        show_progress: Whether to show progress bar
        desc: Progress bar label
        **kwargs: Additional arguments to pass to function

    Returns:
        List of results in input order
    """
    if n_jobs == -1:
        n_jobs = mp.cpu_count()
    if n_jobs < 1:
        raise ValueError(f"n_jobs must be positive or -1, got {n_jobs}")

    if n_jobs == 1:
        if kwargs:
            func = partial(func, **kwargs)
        iterator = tqdm(items, desc=desc, leave=False) if show_progress else items
        return [func(item) for item in iterator]

    return ThreadPool(max_workers=n_jobs).map(func, items, show_progress=show_progress,
                                              desc=desc, **kwargs)
