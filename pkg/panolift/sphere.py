"""
Coordinate conventions shared by every module.

World frame: +X right, +Y up (against gravity), +Z forward. Longitude 0 and
latitude 0 point along +Z. ERP pixel (row i, col j) has its centre at
longitude 2*pi*(j + 0.5)/W - pi and latitude pi/2 - pi*(i + 0.5)/H.

Camera-to-world rotation is R = Ry(yaw) . Rx(pitch) . Rz(roll), angles in
degrees; positive yaw turns toward +X, positive pitch looks up and positive
roll turns image content counter-clockwise.
"""
import warnings
from typing import Tuple

import numpy as np
from pydantic import ValidationError
from scipy.spatial.transform import Rotation

from panolift.exceptions import InvalidArgumentError
from panolift.logging_config import logger
from panolift.schema.camera import AugmentationRanges, CameraParams
from panolift.utils.splitmix import SplitMix64

DOWN = np.array([0.0, -1.0, 0.0])
FORWARD = np.array([0.0, 0.0, 1.0])


def as_image(img) -> np.ndarray:
    """Returns `img` as an H x W x C float array (a 2-D grid gains C = 1)."""
    arr = np.asarray(img)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise InvalidArgumentError(f'expected an H x W x C grid, got shape {arr.shape}')
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    return arr


def check_erp(img) -> np.ndarray:
    """Validates ErpImage invariants: W == 2H, H >= 2, C in {1, 3}."""
    arr = as_image(img)
    H, W, C = arr.shape
    if H < 2 or W != 2 * H:
        raise InvalidArgumentError(f'ERP must satisfy W == 2H and H >= 2, got {H}x{W}')
    if C not in (1, 3):
        raise InvalidArgumentError(f'ERP must have 1 or 3 channels, got {C}')
    return arr


def check_persp(img) -> np.ndarray:
    arr = as_image(img)
    h, w, _ = arr.shape
    if h < 2 or w < 2:
        raise InvalidArgumentError(f'perspective image must be at least 2x2, got {h}x{w}')
    return arr


def _check_dims(H: int, W: int) -> None:
    if H <= 0 or W <= 0:
        raise InvalidArgumentError(f'ERP dimensions must be positive, got {H}x{W}')


def erp_dir(i, j, H: int, W: int) -> np.ndarray:
    """
    Unit direction of continuous ERP coordinate (i, j), pixel centres at integers.

    Args:
        i: Row coordinate(s), broadcastable with `j`.
        j: Column coordinate(s); any real, wrapped modulo W.
        H (int): ERP height.
        W (int): ERP width.

    Returns:
        np.ndarray: Directions of shape broadcast(i, j) + (3,).
    """
    _check_dims(H, W)
    i = np.asarray(i, dtype=np.float64)
    j = np.asarray(j, dtype=np.float64)
    lon = ((j + 0.5) / W - 0.5) * 2.0 * np.pi
    lat = (0.5 - (i + 0.5) / H) * np.pi
    cos_lat = np.cos(lat)
    return np.stack(np.broadcast_arrays(cos_lat * np.sin(lon), np.sin(lat), cos_lat * np.cos(lon)), axis=-1)


def dir_to_erp(d, H: int, W: int) -> Tuple[np.ndarray, np.ndarray]:
    """Continuous (row, col) of direction(s) `d`; col lies in [-0.5, W - 0.5)."""
    _check_dims(H, W)
    d = np.asarray(d, dtype=np.float64)
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    horiz = np.hypot(x, z)
    if np.any(np.hypot(horiz, y) < 1e-12):
        raise InvalidArgumentError('cannot map a zero vector to the ERP')
    lon = np.arctan2(x, z)
    lat = np.arctan2(y, horiz)
    i = (0.5 - lat / np.pi) * H - 0.5
    j = (lon / (2.0 * np.pi) + 0.5) * W - 0.5
    j = np.mod(j + 0.5, W) - 0.5
    return i, j


def erp_grid(H: int, W: int) -> np.ndarray:
    """Pixel-centre directions of an H x W ERP, shape (H, W, 3)."""
    return erp_dir(np.arange(H, dtype=np.float64)[:, None], np.arange(W, dtype=np.float64)[None, :], H, W)


def rotation_from_angles(yaw_deg, pitch_deg, roll_deg) -> np.ndarray:
    """Vectorised Ry(yaw) . Rx(pitch) . Rz(roll); returns (..., 3, 3)."""
    yaw, pitch, roll = np.broadcast_arrays(np.asarray(yaw_deg, dtype=np.float64),
                                           np.asarray(pitch_deg, dtype=np.float64),
                                           np.asarray(roll_deg, dtype=np.float64))
    # scipy's Rx/Rz are counter-clockwise about +X/+Z: negate for "pitch up" and "content CCW"
    angles = np.stack([yaw, -pitch, -roll], axis=-1)
    flat = Rotation.from_euler('YXZ', angles.reshape(-1, 3), degrees=True).as_matrix()
    return flat.reshape(yaw.shape + (3, 3))


def rotation_from_ypr(cam: CameraParams) -> np.ndarray:
    return rotation_from_angles(cam.yaw_deg, cam.pitch_deg, cam.roll_deg)


def yaw_matrix(yaw_deg: float) -> np.ndarray:
    return rotation_from_angles(yaw_deg, 0.0, 0.0)


def ypr_from_rotation(R) -> Tuple[float, float, float]:
    """Inverse of rotation_from_angles: (yaw, pitch, roll) in degrees."""
    with warnings.catch_warnings():
        # gimbal lock at pitch +-90 still yields a valid decomposition
        warnings.simplefilter('ignore', UserWarning)
        a, b, c = Rotation.from_matrix(np.asarray(R, dtype=np.float64)).as_euler('YXZ', degrees=True)
    return float(a), float(-b), float(-c)


def rotate_vectors(R, v) -> np.ndarray:
    """
    Applies R (3x3, or a batch N x 3 x 3) to vectors v (..., 3) elementwise.

    The arithmetic per output element does not depend on batch shape, so a
    batched call is bit-identical to the corresponding single calls.
    """
    R = np.asarray(R, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    lead = R.shape[:-2]
    bcast = lead + (1,) * (v.ndim - 1) + (3,)
    out = v[..., 0:1] * R[..., :, 0].reshape(bcast)
    out = out + v[..., 1:2] * R[..., :, 1].reshape(bcast)
    return out + v[..., 2:3] * R[..., :, 2].reshape(bcast)


def minimal_rotation_between(a, b) -> np.ndarray:
    """
    Smallest rotation taking unit vector `a` onto unit vector `b`.

    Anti-parallel inputs rotate by pi about normalize(+Z x a), or +X when
    that cross product vanishes.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    if np.array_equal(a, b):
        return np.eye(3)
    axis = np.cross(a, b)
    sin_angle = np.linalg.norm(axis)
    cos_angle = float(np.dot(a, b))
    if sin_angle < 1e-12:
        if cos_angle > 0:
            return np.eye(3)
        axis = np.cross(FORWARD, a)
        if np.linalg.norm(axis) < 1e-12:
            axis = np.array([1.0, 0.0, 0.0])
        axis = axis / np.linalg.norm(axis)
        return Rotation.from_rotvec(axis * np.pi).as_matrix()
    angle = np.arctan2(sin_angle, cos_angle)
    return Rotation.from_rotvec(axis / sin_angle * angle).as_matrix()


def sample_camera(rng: SplitMix64, ranges: AugmentationRanges = AugmentationRanges()) -> CameraParams:
    """Draws fov, yaw, pitch, roll (in that order) uniformly from `ranges`."""
    fov = rng.uniform_range(*ranges.fov)
    yaw = rng.uniform_range(*ranges.yaw)
    pitch = rng.uniform_range(*ranges.pitch)
    roll = rng.uniform_range(*ranges.roll)
    try:
        cam = CameraParams(fov_deg=fov, yaw_deg=yaw, pitch_deg=pitch, roll_deg=roll)
    except ValidationError as exc:
        raise InvalidArgumentError(str(exc)) from exc
    logger.debug('Sampled camera %s', cam)
    return cam
