import numpy as np


def is_rotation(m, tol: float = 1e-6) -> bool:
    """True when `m` is 3x3, orthonormal and right-handed within `tol`."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        return False
    if np.max(np.abs(m.T @ m - np.eye(3))) > tol:
        return False
    return abs(np.linalg.det(m) - 1.0) <= tol


def is_unit(v, tol: float = 1e-6) -> bool:
    v = np.asarray(v, dtype=np.float64)
    return v.shape == (3,) and bool(np.all(np.isfinite(v))) and abs(np.linalg.norm(v) - 1.0) <= tol
