# Utils module for logging, output writers and reductions

from .logger import logger, set_debug_mode
from .helpers import (
    get_timestamp,
    write_json,
    write_csv,
    spawn_generators,
    chunk_generator,
    chunk_sizes,
    pairwise_sum,
    parallel_map
)

__all__ = [
    'logger',
    'set_debug_mode',
    'get_timestamp',
    'write_json',
    'write_csv',
    'spawn_generators',
    'chunk_generator',
    'chunk_sizes',
    'pairwise_sum',
    'parallel_map'
]
