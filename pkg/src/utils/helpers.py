# File: src/utils/helpers.py
# Output writers, seeding and deterministic reductions

import os
import csv
import json
import time
import datetime
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence

import numpy as np

from ..core.config import SCHEMA_VERSION
from ..core.errors import NonFiniteValue
from .logger import logger


def get_timestamp():
    """
    Current time as a string and as a float

    Returns:
        tuple: (string_timestamp, float_timestamp)
    """
    now = datetime.datetime.now()
    string_timestamp = now.strftime("%Y%m%d_%H%M%S")
    float_timestamp = time.time()
    return string_timestamp, float_timestamp


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def _non_finite_paths(value, path="$") -> List[str]:
    if isinstance(value, dict):
        return [bad for key, item in value.items() for bad in _non_finite_paths(item, f"{path}.{key}")]
    if isinstance(value, (list, tuple)):
        return [bad for idx, item in enumerate(value) for bad in _non_finite_paths(item, f"{path}[{idx}]")]
    if isinstance(value, np.ndarray) and value.dtype.kind in "fc":
        bad = np.argwhere(~np.isfinite(value))
        return [f"{path}{list(map(int, idx))}" for idx in bad[:5]]
    if isinstance(value, (float, np.floating, complex, np.complexfloating)) and not np.isfinite(value):
        return [path]
    return []


def write_json(path: str, payload: dict) -> str:
    """
    Write a JSON document with the schema version attached

    Args:
        path (str): destination file
        payload (dict): document body

    Returns:
        str: the path written

    Raises:
        NonFiniteValue: if the payload holds NaN or infinity; nothing is written
    """
    document = {"schema": SCHEMA_VERSION}
    document.update(payload)
    bad = _non_finite_paths(document)
    if bad:
        raise NonFiniteValue("refusing to write non-finite numbers", path=path, where=bad[:5])
    text = json.dumps(document, indent=2, sort_keys=True, default=_json_default, allow_nan=False)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")
    logger.info(f"Wrote JSON {path}")
    return path


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12e" % float(value)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """
    Write a CSV table with a header row

    Args:
        path (str): destination file
        header (list): column names
        rows (iterable): row values, floats printed with 12 significant digits

    Returns:
        str: the path written
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
            count += 1
    logger.info(f"Wrote CSV {path} ({count} rows)")
    return path


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """
    Independent generators for `count` work chunks

    Args:
        seed (int): root seed
        count (int): number of chunks

    Returns:
        list: one numpy Generator per chunk, independent of thread count
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def chunk_generator(seed: int, index: int) -> np.random.Generator:
    """Generator of chunk `index`; identical to the index-th child of spawn_generators(seed, ...)"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def chunk_sizes(total: int, chunk: int) -> List[int]:
    """Split `total` items into fixed-size chunks (last one shorter)"""
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


def pairwise_sum(values: Sequence):
    """
    Tree reduction in a fixed order

    Args:
        values (list): numbers or arrays

    Returns:
        The sum, identical for identical inputs whatever produced them
    """
    items = list(values)
    if not items:
        return 0.0
    while len(items) > 1:
        paired = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def parallel_map(func: Callable, items: Sequence, threads: int = 1) -> list:
    """
    Map over items with a thread pool, results in input order

    Args:
        func (callable): work function
        items (list): work items
        threads (int): worker cap; 1 runs inline

    Returns:
        list: func(item) for every item
    """
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
