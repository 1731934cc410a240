"""Resampling between ERP, perspective and cubemap layouts."""
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import ndimage

from panolift.config import CUBE_FACES, SHIFT_SNAP_TOL
from panolift.exceptions import InvalidArgumentError
from panolift.logging_config import logger
from panolift.schema.camera import AugmentationRanges, CameraParams, wrap_degrees
from panolift.sphere import (check_erp, check_persp, dir_to_erp, erp_grid, rotate_vectors,
                             rotation_from_angles, rotation_from_ypr, sample_camera, yaw_matrix,
                             ypr_from_rotation)
from panolift.utils.splitmix import SplitMix64


@dataclass(frozen=True)
class ProjectedConditioning:
    """Perspective content splatted into ERP layout; `mask` marks sampled pixels."""
    image: np.ndarray
    mask: np.ndarray

    @property
    def coverage_pixels(self) -> int:
        return int(self.mask.sum())


# Face orientation: (yaw, pitch); up/down faces have image top toward -Z/+Z
FACE_ANGLES: Dict[str, Tuple[float, float]] = {
    'front': (0.0, 0.0),
    'right': (90.0, 0.0),
    'back': (180.0, 0.0),
    'left': (-90.0, 0.0),
    'up': (0.0, 90.0),
    'down': (0.0, -90.0),
}


@dataclass(frozen=True)
class CubeMap:
    front: np.ndarray
    right: np.ndarray
    back: np.ndarray
    left: np.ndarray
    up: np.ndarray
    down: np.ndarray

    def faces(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in CUBE_FACES}

    @property
    def face_size(self) -> int:
        return self.front.shape[0]


def face_camera(name: str) -> CameraParams:
    yaw, pitch = FACE_ANGLES[name]
    return CameraParams(fov_deg=90.0, yaw_deg=yaw, pitch_deg=pitch, roll_deg=0.0)


def _snap_shift(col_offset: float) -> Tuple[int, float]:
    """Splits a column offset into an exact integer shift and a residual."""
    k = int(np.round(col_offset))
    if abs(col_offset - k) <= SHIFT_SNAP_TOL:
        return k, 0.0
    return 0, col_offset


def channel_planes(img) -> np.ndarray:
    """C x H x W contiguous copy of an H x W x C image."""
    return np.ascontiguousarray(np.moveaxis(np.asarray(img), -1, 0))


def _bilinear(planes: np.ndarray, rows, cols, mode: str) -> np.ndarray:
    """Order-1 map_coordinates on every plane; returns broadcast(rows, cols).shape + (C,)."""
    rows, cols = np.broadcast_arrays(np.asarray(rows, dtype=np.float64), np.asarray(cols, dtype=np.float64))
    C = planes.shape[0]
    if rows.size == 0:
        return np.zeros(rows.shape + (C,))
    coords = np.stack([rows.ravel(), cols.ravel()])
    out = np.empty((C, coords.shape[1]))
    for c in range(C):
        ndimage.map_coordinates(planes[c], coords, output=out[c], order=1, mode=mode, prefilter=False)
    return np.ascontiguousarray(out.T).reshape(rows.shape + (C,))


def sample_planes(planes: np.ndarray, i, j, col_offset: float = 0.0) -> np.ndarray:
    """sample_erp on an ERP already split into C x H x W planes."""
    H = planes.shape[1]
    shift, frac = _snap_shift(col_offset)
    if shift:
        # roll(a, -k)[j] == a[j + k] keeps the fractional weights of j untouched
        planes = np.roll(planes, -shift, axis=2)
    rows = np.clip(np.asarray(i, dtype=np.float64), 0.0, H - 1.0)
    return _bilinear(planes, rows, np.asarray(j, dtype=np.float64) + frac, 'grid-wrap')


def sample_erp(erp: np.ndarray, i, j, col_offset: float = 0.0) -> np.ndarray:
    """
    Bilinear ERP lookup: wraps horizontally, clamps vertically.

    An integral `col_offset` is applied as an exact column roll, so sampling
    at pixel centres with such an offset reproduces a circular shift exactly.
    """
    return sample_planes(channel_planes(erp), i, j, col_offset)


def sample_clamped(img: np.ndarray, v, u) -> np.ndarray:
    """Bilinear lookup clamped on both axes (perspective images, cube faces)."""
    h, w = img.shape[:2]
    rows = np.clip(np.asarray(v, dtype=np.float64), 0.0, h - 1.0)
    cols = np.clip(np.asarray(u, dtype=np.float64), 0.0, w - 1.0)
    return _bilinear(channel_planes(img), rows, cols, 'nearest')


def focal_length(fov_deg: float, w: int) -> float:
    return (w / 2.0) / np.tan(np.radians(fov_deg) / 2.0)


def camera_rays(fov_deg: float, h: int, w: int) -> np.ndarray:
    """Unit camera-frame rays through pixel centres, shape (h, w, 3)."""
    f = focal_length(fov_deg, w)
    u = np.arange(w, dtype=np.float64) + 0.5 - w / 2.0
    v = -(np.arange(h, dtype=np.float64) + 0.5 - h / 2.0)
    x, y = np.meshgrid(u, v)
    rays = np.stack([x, y, np.full_like(x, f)], axis=-1)
    return rays / np.linalg.norm(rays, axis=-1, keepdims=True)


def _check_out_dims(h: int, w: int) -> None:
    if h < 2 or w < 2:
        raise InvalidArgumentError(f'output must be at least 2x2, got {h}x{w}')


def render_rays(planes: np.ndarray, rays: np.ndarray, R, col_offset: float = 0.0) -> np.ndarray:
    """
    Samples ERP planes (C x H x W) along unit `rays` turned by R.

    R is 3x3 or a batch N x 3 x 3; a batched call is elementwise identical
    to the corresponding single calls. Returns R.shape[:-2] + rays.shape[:-1] + (C,).
    """
    H, W = planes.shape[1:]
    dirs = rotate_vectors(R, rays)
    # rotated unit rays: latitude is arcsin(y)
    lon = np.arctan2(dirs[..., 0], dirs[..., 2])
    lat = np.arcsin(np.clip(dirs[..., 1], -1.0, 1.0))
    i = (0.5 - lat / np.pi) * H - 0.5
    j = (lon / (2.0 * np.pi) + 0.5) * W - 0.5
    return sample_planes(planes, i, j, col_offset)


def pano2pers(erp, cam: CameraParams, out_h: int, out_w: int) -> np.ndarray:
    """
    Renders the perspective view of `cam` from an ERP.

    Yaw is applied as a longitude offset after the pitch/roll rotation, so
    yaw steps that are multiples of 360/W degrees shift columns exactly.
    """
    erp = check_erp(erp)
    _check_out_dims(out_h, out_w)
    R = rotation_from_angles(0.0, cam.pitch_deg, cam.roll_deg)
    return render_rays(channel_planes(erp), camera_rays(cam.fov_deg, out_h, out_w), R,
                       cam.yaw_deg * erp.shape[1] / 360.0)


def pano2pers_batch(erp, fov_deg: float, yaw_deg: float, pitches: Sequence[float],
                    rolls: Sequence[float], out_h: int, out_w: int) -> np.ndarray:
    """
    Renders N cameras sharing fov and yaw; returns (N, out_h, out_w, C).

    Elementwise identical to calling pano2pers once per camera.
    """
    erp = check_erp(erp)
    _check_out_dims(out_h, out_w)
    R = rotation_from_angles(0.0, np.asarray(pitches, dtype=np.float64), np.asarray(rolls, dtype=np.float64))
    return render_rays(channel_planes(erp), camera_rays(fov_deg, out_h, out_w), R.reshape(-1, 3, 3),
                       yaw_deg * erp.shape[1] / 360.0)


def _project_into_camera(cam: CameraParams, h: int, w: int, H: int, W: int):
    """Perspective pixel coordinates of every ERP pixel plus the frustum mask."""
    dirs = erp_grid(H, W)
    R = rotation_from_ypr(cam)
    # camera-frame ray: R^T d
    local = rotate_vectors(R.T, dirs)
    f = focal_length(cam.fov_deg, w)
    forward = local[..., 2] > 0.0
    depth = np.where(forward, local[..., 2], 1.0)
    u = f * local[..., 0] / depth + w / 2.0 - 0.5
    v = -f * local[..., 1] / depth + h / 2.0 - 0.5
    mask = forward & (u >= -0.5) & (u <= w - 0.5) & (v >= -0.5) & (v <= h - 0.5)
    return u, v, mask


def projection_mask(cam: CameraParams, h: int, w: int, H: int, W: int) -> np.ndarray:
    """ERP pixels covered by the frustum of an h x w view under `cam`."""
    _check_out_dims(h, w)
    if H < 2 or W != 2 * H:
        raise InvalidArgumentError(f'ERP must satisfy W == 2H, got {H}x{W}')
    return _project_into_camera(cam, h, w, H, W)[2]


def pers2pano(pers, cam: CameraParams, H: int, W: int) -> ProjectedConditioning:
    """Splats a perspective image into an H x W ERP, zero outside its frustum."""
    pers = check_persp(pers)
    if H < 2 or W != 2 * H:
        raise InvalidArgumentError(f'ERP must satisfy W == 2H, got {H}x{W}')
    h, w, C = pers.shape
    u, v, mask = _project_into_camera(cam, h, w, H, W)
    image = np.zeros((H, W, C), dtype=np.float64)
    image[mask] = sample_clamped(pers, v[mask], u[mask])
    logger.debug('pers2pano covered %d of %d ERP pixels', int(mask.sum()), H * W)
    return ProjectedConditioning(image=image, mask=mask)


def rotate_erp(erp, R) -> np.ndarray:
    """
    Full-sphere rotation: output direction d takes the input value at R . d.

    R is split into a yaw and a residual; a residual within 1e-12 of the
    identity leaves the sample points on pixel centres.
    """
    erp = check_erp(erp)
    H, W = erp.shape[:2]
    R = np.asarray(R, dtype=np.float64)
    yaw, _, _ = ypr_from_rotation(R)
    residual = yaw_matrix(-yaw) @ R
    if np.max(np.abs(residual - np.eye(3))) <= 1e-12:
        i = np.arange(H, dtype=np.float64)[:, None]
        j = np.arange(W, dtype=np.float64)[None, :]
    else:
        i, j = dir_to_erp(rotate_vectors(residual, erp_grid(H, W)), H, W)
    return sample_erp(erp, i, j, yaw * W / 360.0)


def erp_to_cubemap(erp, face_size: int) -> CubeMap:
    erp = check_erp(erp)
    if face_size < 2:
        raise InvalidArgumentError(f'face size must be >= 2, got {face_size}')
    faces = {name: pano2pers(erp, face_camera(name), face_size, face_size) for name in CUBE_FACES}
    return CubeMap(**faces)


# Dominant axis and sign -> face
_AXIS_FACES = {(0, True): 'right', (0, False): 'left', (1, True): 'up', (1, False): 'down',
               (2, True): 'front', (2, False): 'back'}


def cubemap_to_erp(cube: CubeMap, H: int, W: int) -> np.ndarray:
    """Each ERP direction samples the face whose axis dominates it."""
    shapes = {face.shape for face in cube.faces().values()}
    if len(shapes) != 1:
        raise InvalidArgumentError(f'cube faces differ in shape: {sorted(shapes)}')
    S, S2, C = cube.front.shape if cube.front.ndim == 3 else cube.front.shape + (1,)
    if S != S2 or S < 2:
        raise InvalidArgumentError(f'cube faces must be square, got {S}x{S2}')
    if H < 2 or W != 2 * H:
        raise InvalidArgumentError(f'ERP must satisfy W == 2H, got {H}x{W}')
    dirs = erp_grid(H, W)
    axis = np.argmax(np.abs(dirs), axis=-1)
    positive = np.take_along_axis(dirs, axis[..., None], axis=-1)[..., 0] > 0
    out = np.zeros((H, W, C), dtype=np.float64)
    f = S / 2.0
    for (ax, sign), name in _AXIS_FACES.items():
        sel = (axis == ax) & (positive == sign)
        if not sel.any():
            continue
        R = rotation_from_ypr(face_camera(name))
        local = rotate_vectors(R.T, dirs[sel])
        u = f * local[:, 0] / local[:, 2] + S / 2.0 - 0.5
        v = -f * local[:, 1] / local[:, 2] + S / 2.0 - 0.5
        face = cube.faces()[name]
        out[sel] = sample_clamped(face if face.ndim == 3 else face[:, :, None], v, u)
    return out


def horizon_views(erp, count: int = 8, fov_deg: float = 90.0, size: int = 256) -> List[Tuple[CameraParams, np.ndarray]]:
    """Views at elevation 0 and uniform azimuth, e.g. for a gravity estimator."""
    if count < 1:
        raise InvalidArgumentError('need at least one view')
    cams = [CameraParams(fov_deg=fov_deg, yaw_deg=wrap_degrees(360.0 * k / count)) for k in range(count)]
    return [(cam, pano2pers(erp, cam, size, size)) for cam in cams]


def cardinal_views(erp, fov_deg: float = 90.0, size: int = 256) -> Dict[str, np.ndarray]:
    """Front, right, back and left crops at elevation 0."""
    names = ('front', 'right', 'back', 'left')
    return {name: pano2pers(erp, face_camera(name).model_copy(update={'fov_deg': fov_deg}), size, size)
            for name in names}


def eval_crops(erp, rng: SplitMix64, count: int = 10, fov_deg: float = 90.0, size: int = 256,
               yaw_range: Tuple[float, float] = (90.0, 270.0)) -> List[Tuple[CameraParams, np.ndarray]]:
    """Crops at random azimuths in `yaw_range`, away from the input view at yaw 0."""
    crops = []
    for _ in range(count):
        cam = CameraParams(fov_deg=fov_deg, yaw_deg=wrap_degrees(rng.uniform_range(*yaw_range)))
        crops.append((cam, pano2pers(erp, cam, size, size)))
    return crops


def sample_conditioning_crop(erp, rng: SplitMix64, h: int, w: int,
                             ranges: AugmentationRanges = AugmentationRanges()) -> Tuple[np.ndarray, CameraParams]:
    """Draws a camera from `ranges` and crops the ERP with it."""
    cam = sample_camera(rng, ranges)
    return pano2pers(erp, cam, h, w), cam
