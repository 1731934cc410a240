"""Network-free evaluation metrics."""
import math
from typing import Optional, Sequence

import numpy as np

from panolift.codec import LATENT_FACTOR, PaddingMode, circular_encode, encode, shift_columns
from panolift.exceptions import EmptyMaskError, InvalidArgumentError
from panolift.logging_config import logger
from panolift.projection import projection_mask
from panolift.schema.results import MetricReport
from panolift.schema.trajectory import Trajectory
from panolift.sphere import as_image, check_erp


def column_gradients(img) -> np.ndarray:
    """g[j] = mean over rows and channels of |Y[:, (j+1) mod W] - Y[:, j]|."""
    arr = as_image(img).astype(np.float64)
    return np.abs(np.roll(arr, -1, axis=1) - arr).mean(axis=(0, 2))


def discontinuity_score(img) -> float:
    """
    Seam metric: 100 * max(0, wrap-pair gradient - median interior gradient).

    Lies in [0, 100] for images in [0, 1]; the image need not be 2:1.
    """
    arr = as_image(img)
    if arr.shape[1] < 2:
        raise InvalidArgumentError('need at least two columns')
    g = column_gradients(arr)
    return float(100.0 * max(0.0, g[-1] - np.median(g[:-1])))


def solid_angle_weights(H: int, W: int) -> np.ndarray:
    lat = (0.5 - (np.arange(H) + 0.5) / H) * np.pi
    return np.repeat(np.cos(lat)[:, None], W, axis=1)


def coverage_fraction(mask) -> float:
    """Fraction of the sphere's solid angle covered by an ERP mask."""
    mask = np.asarray(mask, dtype=bool)
    weights = solid_angle_weights(*mask.shape)
    return float((weights * mask).sum() / weights.sum())


def union_mask(traj: Trajectory, pers_h: int, pers_w: int, H: int, W: int) -> np.ndarray:
    mask = np.zeros((H, W), dtype=bool)
    for cam in traj.cameras:
        mask |= projection_mask(cam, pers_h, pers_w, H, W)
    return mask


def psnr(a, b, mask: Optional[np.ndarray] = None) -> float:
    """PSNR with peak 1.0; +inf for identical inputs."""
    a = as_image(a).astype(np.float64)
    b = as_image(b).astype(np.float64)
    if a.shape != b.shape:
        raise InvalidArgumentError(f'shape mismatch: {a.shape} vs {b.shape}')
    diff = (a - b) ** 2
    if mask is not None:
        if not mask.any():
            raise EmptyMaskError('mask selects no pixels')
        diff = diff[mask]
    mse = float(diff.mean())
    return math.inf if mse == 0.0 else 10.0 * math.log10(1.0 / mse)


def masked_psnr(gt: Sequence, gen: Sequence, traj: Trajectory, pers_h: int, pers_w: int) -> MetricReport:
    """
    PSNR over the union of ERP regions the trajectory's views cover.

    The union is taken across all frames and applied to every frame.
    """
    if len(gt) != len(gen):
        raise InvalidArgumentError(f'{len(gt)} ground-truth frames but {len(gen)} generated')
    if len(gt) != len(traj):
        raise InvalidArgumentError(f'{len(gt)} frames but trajectory has {len(traj)}')
    gt = [check_erp(f).astype(np.float64) for f in gt]
    gen = [check_erp(f).astype(np.float64) for f in gen]
    for k, (a, b) in enumerate(zip(gt, gen)):
        if a.shape != b.shape or a.shape != gt[0].shape:
            raise InvalidArgumentError(f'frame {k} shape mismatch: {a.shape} vs {b.shape}')
    H, W = gt[0].shape[:2]
    mask = union_mask(traj, pers_h, pers_w, H, W)
    if not mask.any():
        raise EmptyMaskError('trajectory covers no ERP pixels')
    squared = np.stack([((a - b) ** 2)[mask] for a, b in zip(gt, gen)])
    mse = float(squared.mean())
    value = math.inf if mse == 0.0 else 10.0 * math.log10(1.0 / mse)
    per_frame = [psnr(a, b, mask) for a, b in zip(gt, gen)]
    coverage = coverage_fraction(mask)
    logger.info('Masked PSNR %.4f dB over %.2f%% of the sphere', value, 100.0 * coverage)
    return MetricReport(name='masked_psnr', value=value, coverage=coverage, per_frame=per_frame)


def latent_equivariance_error(erp, use_cle: bool) -> float:
    """
    Mean |ENC(shift(erp, 8s)) - shift(ENC(erp), s)| with s = Wl / 2.

    ENC is circular_encode when `use_cle`, otherwise zero-padded encode.
    """
    erp = check_erp(erp)
    W = erp.shape[1]
    if W % (LATENT_FACTOR * LATENT_FACTOR):
        raise InvalidArgumentError(f'ERP width {W} must be divisible by {LATENT_FACTOR * LATENT_FACTOR}')

    def enc(img):
        return circular_encode(img) if use_cle else encode(img, PaddingMode.ZERO)

    s = (W // LATENT_FACTOR) // 2
    shifted = enc(shift_columns(erp, LATENT_FACTOR * s))
    return float(np.mean(np.abs(shifted - shift_columns(enc(erp), s))))
