"""General utility functions and helpers."""

from .io import (
    save_json,
    load_json,
    save_csv,
    read_csv,
    write_text,
)

from .decorators import timer

from .parallel import (
    parallel_map,
    ThreadPool,
)

__all__ = [
    # I/O utilities
    'save_json',
    'load_json',
    'save_csv',
    'read_csv',
    'write_text',

    # Decorators
    'timer',

    # Parallel processing
    'parallel_map',
    'ThreadPool',
]
