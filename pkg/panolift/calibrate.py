"""
Zero-shot camera calibration against a panorama.

Exhaustive coarse grid over (fov, pitch, roll), then a fine grid around the
coarse optimum, scoring the squared difference between the perspective
image and pano2pers renders at reduced resolution.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple, Tuple

import numpy as np

from panolift.config import YAW_RING_STEP
from panolift.exceptions import InvalidArgumentError
from panolift.logging_config import logger
from panolift.projection import camera_rays, channel_planes, pano2pers, render_rays
from panolift.schema.camera import CameraParams, wrap_degrees
from panolift.schema.configs import AxisGrid, SearchConfig
from panolift.schema.results import CalibResult
from panolift.sphere import check_erp, check_persp, rotation_from_angles


class GridPoints(NamedTuple):
    fov: np.ndarray
    pitch: np.ndarray
    roll: np.ndarray
    yaw: np.ndarray

    @property
    def size(self) -> int:
        return len(self.fov) * len(self.pitch) * len(self.roll) * len(self.yaw)


class StageResult(NamedTuple):
    camera: CameraParams
    residual: float
    evaluations: int


def _axis_values(axis: AxisGrid) -> np.ndarray:
    return axis.lo + axis.step * np.arange(axis.count, dtype=np.float64)


def _fine_values(axis: AxisGrid, center: float) -> np.ndarray:
    n = int(axis.step / axis.fine_step + 1e-9)
    values = center + axis.fine_step * np.arange(-n, n + 1, dtype=np.float64)
    # stay inside the closure of the coarse grid
    return values[(values >= axis.lo - 1e-9) & (values <= axis.hi + 1e-9)]


def yaw_ring(cfg: SearchConfig) -> np.ndarray:
    if not cfg.search_yaw:
        return np.zeros(1)
    return np.array([wrap_degrees(a) for a in np.arange(0.0, 360.0, YAW_RING_STEP)])


def coarse_grid(cfg: SearchConfig) -> GridPoints:
    return GridPoints(_axis_values(cfg.fov), _axis_values(cfg.pitch), _axis_values(cfg.roll), yaw_ring(cfg))


def fine_grid(cfg: SearchConfig, center: CameraParams) -> GridPoints:
    """Fine grid of half-width one coarse step around `center`; yaw is held fixed."""
    return GridPoints(_fine_values(cfg.fov, center.fov_deg), _fine_values(cfg.pitch, center.pitch_deg),
                      _fine_values(cfg.roll, center.roll_deg), np.array([center.yaw_deg]))


def scoring_shape(h: int, w: int, res: int) -> Tuple[int, int]:
    """Scoring resolution: `res` wide, aspect preserved (res x res for square inputs)."""
    return max(2, int(round(res * h / w))), res


def _box_weights(n: int, out: int) -> np.ndarray:
    # overlap of input pixel [p, p+1) with output bin k, normalised per bin
    scale = n / out
    lo = np.arange(out, dtype=np.float64)[:, None] * scale
    hi = lo + scale
    p = np.arange(n, dtype=np.float64)[None, :]
    overlap = np.clip(np.minimum(hi, p + 1.0) - np.maximum(lo, p), 0.0, None)
    return overlap / scale


def box_downsample(img, out_h: int, out_w: int) -> np.ndarray:
    """Area-averaging resize; exact for any integer or fractional factor."""
    img = check_persp(img).astype(np.float64)
    h, w = img.shape[:2]
    rows = _box_weights(h, out_h)
    cols = _box_weights(w, out_w)
    tmp = np.tensordot(rows, img, axes=([1], [0]))
    return np.transpose(np.tensordot(cols, tmp, axes=([1], [1])), (1, 0, 2))


def _mse(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean((a - b) ** 2))


def render_residual(pers, erp, cam: CameraParams, res: int) -> float:
    """Mean squared error between the box-downsampled `pers` and a render of `cam`."""
    pers = check_persp(pers)
    erp = check_erp(erp)
    out_h, out_w = scoring_shape(pers.shape[0], pers.shape[1], res)
    target = box_downsample(pers, out_h, out_w)
    return _mse(pano2pers(erp, cam, out_h, out_w), target)


def _score_fov_slice(target: np.ndarray, planes: np.ndarray, fov: float, grid: GridPoints) -> np.ndarray:
    """Residuals of one fov value, shape (pitch, roll, yaw)."""
    h, w = target.shape[:2]
    W = planes.shape[2]
    rays = camera_rays(fov, h, w)
    scores = np.empty((len(grid.pitch), len(grid.roll), len(grid.yaw)))
    for b, pitch in enumerate(grid.pitch):
        R = rotation_from_angles(0.0, np.full(len(grid.roll), pitch), grid.roll)
        for d, yaw in enumerate(grid.yaw):
            renders = render_rays(planes, rays, R, yaw * W / 360.0)
            for c in range(len(grid.roll)):
                scores[b, c, d] = _mse(renders[c], target)
    return scores


def score_grid(target: np.ndarray, erp: np.ndarray, grid: GridPoints, workers: int = 1) -> np.ndarray:
    """
    Residuals over `grid`, shape (fov, pitch, roll, yaw), lexicographic order.

    Rays are built once per fov, each row of rolls is rendered in one call and fov
    slices are spread over `workers` threads; the result does not depend on
    the worker count.
    """
    planes = channel_planes(erp)
    if workers <= 1:
        slices = [_score_fov_slice(target, planes, fov, grid) for fov in grid.fov]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            slices = list(pool.map(lambda fov: _score_fov_slice(target, planes, fov, grid), grid.fov))
    return np.stack(slices) if slices else np.empty((0, len(grid.pitch), len(grid.roll), len(grid.yaw)))


def _argmin_camera(scores: np.ndarray, grid: GridPoints) -> Tuple[CameraParams, float]:
    # first minimum in (fov, pitch, roll, yaw) order breaks ties toward smaller values
    a, b, c, d = np.unravel_index(int(np.argmin(scores)), scores.shape)
    cam = CameraParams(fov_deg=float(grid.fov[a]), yaw_deg=float(grid.yaw[d]),
                       pitch_deg=float(grid.pitch[b]), roll_deg=float(grid.roll[c]))
    return cam, float(scores[a, b, c, d])


def _prepare(pers, erp, cfg: SearchConfig):
    pers = check_persp(pers)
    erp = check_erp(erp)
    if pers.shape[2] != erp.shape[2]:
        raise InvalidArgumentError(f'channel mismatch: perspective {pers.shape[2]}, ERP {erp.shape[2]}')
    out_h, out_w = scoring_shape(pers.shape[0], pers.shape[1], cfg.render_size)
    return pers, erp, box_downsample(pers, out_h, out_w)


def coarse_search(pers, erp, cfg: SearchConfig = SearchConfig(), workers: int = 1) -> StageResult:
    _, erp, target = _prepare(pers, erp, cfg)
    grid = coarse_grid(cfg)
    if grid.size == 0:
        raise InvalidArgumentError('search grid is empty')
    cam, residual = _argmin_camera(score_grid(target, erp, grid, workers), grid)
    return StageResult(cam, residual, grid.size)


def calibrate(pers, erp, cfg: SearchConfig = SearchConfig(), workers: int = 1) -> CalibResult:
    """
    Coarse-to-fine exhaustive search for the camera that renders `pers` from `erp`.

    Args:
        pers: Perspective image, H x W x C in [0, 1].
        erp: Panorama the view was (nominally) taken from.
        cfg (SearchConfig): Grid, scoring resolution and yaw handling.
        workers (int): Threads scoring fov slices; results do not depend on it.

    Returns:
        CalibResult: Best camera, full-resolution residual and evaluation count.
    """
    pers, erp, target = _prepare(pers, erp, cfg)
    coarse = coarse_grid(cfg)
    if coarse.size == 0:
        raise InvalidArgumentError('search grid is empty')
    coarse_cam, coarse_res = _argmin_camera(score_grid(target, erp, coarse, workers), coarse)
    logger.info('Coarse optimum %s residual %.6g after %d evaluations', coarse_cam, coarse_res, coarse.size)

    fine = fine_grid(cfg, coarse_cam)
    best_cam, best_res = _argmin_camera(score_grid(target, erp, fine, workers), fine)
    if best_res > coarse_res:
        raise RuntimeError('fine stage lost the coarse optimum')
    evaluations = coarse.size + fine.size

    full = _mse(pano2pers(erp, best_cam, pers.shape[0], pers.shape[1]), pers)
    logger.info('Calibrated %s residual %.6g (%d evaluations)', best_cam, full, evaluations)
    return CalibResult(fov_deg=best_cam.fov_deg, yaw_deg=best_cam.yaw_deg, pitch_deg=best_cam.pitch_deg,
                       roll_deg=best_cam.roll_deg, residual=full, scoring_residual=best_res,
                       evaluations=evaluations)
