"""
Two-stage video canonicalisation: stabilise every frame to frame 0's
orientation, then rotate the clip so the averaged gravity points down.

Poses and gravity estimates come from external tools; only their
consumption lives here.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence

import numpy as np

from panolift.exceptions import InvalidArgumentError
from panolift.logging_config import logger
from panolift.projection import rotate_erp
from panolift.sphere import DOWN, check_erp, minimal_rotation_between, yaw_matrix
from panolift.utils.checks import is_rotation
from panolift.utils.splitmix import SplitMix64


def _map_frames(fn: Callable, items: Sequence, workers: int) -> List[np.ndarray]:
    # order preserved; each frame is independent
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _check_poses(frames: Sequence, poses: Sequence) -> List[np.ndarray]:
    if len(frames) != len(poses):
        raise InvalidArgumentError(f'{len(frames)} frames but {len(poses)} poses')
    rotations = [np.asarray(p, dtype=np.float64) for p in poses]
    for k, R in enumerate(rotations):
        if not is_rotation(R, tol=1e-6):
            raise InvalidArgumentError(f'pose {k} is not a rotation matrix')
    return rotations


def stabilize(frames: Sequence, poses: Sequence, workers: int = 1) -> List[np.ndarray]:
    """
    Rotates every frame into frame 0's orientation.

    Frame k is resampled once with R_k^T . R_0; frame 0 is returned unchanged.
    """
    rotations = _check_poses(frames, poses)
    if not frames:
        return []
    R0 = rotations[0]

    def _one(k: int) -> np.ndarray:
        frame = check_erp(frames[k])
        if k == 0:
            return frame.copy()
        return rotate_erp(frame, rotations[k].T @ R0)

    logger.info('Stabilising %d frames', len(frames))
    return _map_frames(_one, range(len(frames)), workers)


def average_gravity(estimates) -> np.ndarray:
    """
    Robust mean of gravity directions.

    Estimates deviating from the normalised mean by more than
    mean + 3 std of the angular deviations are dropped once; the survivors
    are averaged and normalised.
    """
    g = np.asarray(estimates, dtype=np.float64).reshape(-1, 3)
    if g.shape[0] == 0:
        raise InvalidArgumentError('need at least one gravity estimate')
    norms = np.linalg.norm(g, axis=1)
    if np.any(norms < 1e-12):
        raise InvalidArgumentError('gravity estimates must be non-zero')
    g = g / norms[:, None]
    mean = g.mean(axis=0)
    if np.linalg.norm(mean) < 1e-12:
        raise InvalidArgumentError('gravity estimates cancel out')
    m0 = mean / np.linalg.norm(mean)
    angles = np.arccos(np.clip(g @ m0, -1.0, 1.0))
    keep = angles <= angles.mean() + 3.0 * angles.std()
    if not keep.any():
        return m0
    if not keep.all():
        logger.warning('Dropped %d of %d gravity estimates as outliers', int((~keep).sum()), len(g))
    survivors = g[keep].mean(axis=0)
    return survivors / np.linalg.norm(survivors)


def alignment_rotation(g) -> np.ndarray:
    """Rotation taking gravity `g` onto -Y."""
    return minimal_rotation_between(g, DOWN)


def gravity_align(frames: Sequence, g, workers: int = 1) -> List[np.ndarray]:
    """Rotates every frame so gravity `g` ends up pointing to the image bottom."""
    A = alignment_rotation(g)
    # the output direction A.g must read the input at g, hence A^T
    return _map_frames(lambda frame: rotate_erp(frame, A.T), list(frames), workers)


def lift_view_gravity(g_view, yaw_deg: float) -> np.ndarray:
    """Expresses a gravity estimate from a level view at `yaw_deg` in the panorama frame."""
    g = yaw_matrix(yaw_deg) @ np.asarray(g_view, dtype=np.float64)
    return g / np.linalg.norm(g)


def canonicalize_video(frames: Sequence, poses: Sequence, gravity_estimates=None,
                       workers: int = 1) -> List[np.ndarray]:
    """
    Stabilisation and gravity alignment with one resampling per frame.

    `gravity_estimates` must already be expressed in the stabilised frame;
    when omitted the clip is only stabilised.
    """
    rotations = _check_poses(frames, poses)
    if not frames:
        return []
    A = np.eye(3) if gravity_estimates is None else alignment_rotation(average_gravity(gravity_estimates))
    R0 = rotations[0]
    aligned = np.array_equal(A, np.eye(3))
    logger.info('Canonicalising %d frames (gravity alignment %s)', len(frames),
                'skipped' if aligned else 'applied')

    def _one(k: int) -> np.ndarray:
        frame = check_erp(frames[k])
        if k == 0 and aligned:
            return frame.copy()
        stab = np.eye(3) if k == 0 else rotations[k].T @ R0
        return rotate_erp(frame, stab @ A.T)

    return _map_frames(_one, range(len(frames)), workers)


def yaw_shift_augment(erp, k: int) -> np.ndarray:
    """Horizontal roll augmentation: exact circular shift of columns by k."""
    return np.roll(check_erp(erp), int(k), axis=1)


def random_yaw_shift(erp, rng: SplitMix64) -> np.ndarray:
    erp = check_erp(erp)
    return yaw_shift_augment(erp, rng.randint(0, erp.shape[1] - 1))
