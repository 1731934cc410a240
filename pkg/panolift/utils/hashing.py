import hashlib
from typing import Iterable

import numpy as np


def array_digest(arrays: Iterable[np.ndarray]) -> str:
    """
    Returns a SHA-256 hex digest over arrays in iteration order.

    Each array is cast to little-endian float64 and hashed in C order, so
    the digest is identical across platforms for identical values.

    :param arrays: Arrays to hash, order significant
    :return: 64-character hexadecimal digest
    """
    hashed = hashlib.sha256()
    for arr in arrays:
        hashed.update(np.ascontiguousarray(arr, dtype='<f8').tobytes())
    return hashed.hexdigest()
