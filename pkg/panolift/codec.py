"""
Deterministic convolutional codec standing in for a learned latent VAE.

Encoder: three 3x3 stride-2 convolutions, channels 3 -> 8 -> 16 -> 4, tanh
after the first two. Decoder: three stages of nearest 2x upsampling and a
3x3 stride-1 convolution, channels 4 -> 16 -> 8 -> 3, tanh after the first
two. Biases are zero. Vertical padding is always zero; horizontal padding is
zero or circular per `PaddingMode`.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from panolift.config import CODEC_SEED, DEFAULT_DECODE_PAD, LATENT_CHANNELS, LATENT_FACTOR
from panolift.exceptions import InvalidArgumentError
from panolift.logging_config import logger
from panolift.sphere import as_image
from panolift.utils.hashing import array_digest
from panolift.utils.splitmix import SplitMix64

ENCODER_CHANNELS = (3, 8, 16, LATENT_CHANNELS)
DECODER_CHANNELS = (LATENT_CHANNELS, 16, 8, 3)


class PaddingMode(str, Enum):
    ZERO = 'zero'
    CIRCULAR = 'circular'


def _fill_kernel(rng: SplitMix64, out_ch: int, in_ch: int) -> np.ndarray:
    bound = (in_ch * 9) ** -0.5
    # index order [out][in][ky][kx]
    values = [bound * (2.0 * rng.weights_uniform() - 1.0) for _ in range(out_ch * in_ch * 9)]
    kernel = np.array(values, dtype=np.float64).reshape(out_ch, in_ch, 3, 3)
    kernel.flags.writeable = False
    return kernel


@dataclass(frozen=True)
class CodecWeights:
    encoder: Tuple[np.ndarray, ...]
    decoder: Tuple[np.ndarray, ...]

    @classmethod
    def from_seed(cls, seed: int = CODEC_SEED) -> 'CodecWeights':
        rng = SplitMix64(seed)
        encoder = tuple(_fill_kernel(rng, ENCODER_CHANNELS[k + 1], ENCODER_CHANNELS[k]) for k in range(3))
        decoder = tuple(_fill_kernel(rng, DECODER_CHANNELS[k + 1], DECODER_CHANNELS[k]) for k in range(3))
        logger.debug('Codec weights filled from seed %#x', seed)
        return cls(encoder=encoder, decoder=decoder)

    def digest(self) -> str:
        """SHA-256 over all kernels in fill order (enc1..enc3, dec1..dec3)."""
        return array_digest(self.encoder + self.decoder)


@lru_cache(maxsize=None)
def default_weights() -> CodecWeights:
    weights = CodecWeights.from_seed(CODEC_SEED)
    logger.debug('Codec weights digest %s', weights.digest())
    return weights


def _pad(x: np.ndarray, mode: PaddingMode, width: int = 1) -> np.ndarray:
    horizontal = 'wrap' if PaddingMode(mode) is PaddingMode.CIRCULAR else 'constant'
    x = np.pad(x, ((0, 0), (width, width), (0, 0)), mode=horizontal)
    return np.pad(x, ((width, width), (0, 0), (0, 0)), mode='constant')


def conv3x3(x: np.ndarray, kernel: np.ndarray, stride: int, mode: PaddingMode) -> np.ndarray:
    """3x3 convolution with one pixel of padding per side; x is H x W x C_in."""
    windows = sliding_window_view(_pad(x, mode), (3, 3), axis=(0, 1))[::stride, ::stride]
    return np.tensordot(windows, kernel, axes=([2, 3, 4], [1, 2, 3]))


def _as_codec_input(img) -> np.ndarray:
    x = as_image(img).astype(np.float64)
    if x.shape[2] == 1:
        x = np.repeat(x, 3, axis=2)
    if x.shape[2] != ENCODER_CHANNELS[0]:
        raise InvalidArgumentError(f'codec expects 1 or 3 channels, got {x.shape[2]}')
    return x


def encode(img, mode: PaddingMode = PaddingMode.ZERO, weights: Optional[CodecWeights] = None) -> np.ndarray:
    """Encodes an H x W image to an H/8 x W/8 x 4 latent."""
    x = _as_codec_input(img)
    H, W = x.shape[:2]
    if H % LATENT_FACTOR or W % LATENT_FACTOR:
        raise InvalidArgumentError(f'image dims {H}x{W} must be divisible by {LATENT_FACTOR}')
    weights = weights or default_weights()
    for k, kernel in enumerate(weights.encoder):
        x = conv3x3(x, kernel, 2, mode)
        if k < 2:
            x = np.tanh(x)
    return x


def decode(lat, mode: PaddingMode = PaddingMode.ZERO, weights: Optional[CodecWeights] = None) -> np.ndarray:
    """Decodes an Hl x Wl x 4 latent to an 8Hl x 8Wl x 3 image."""
    x = as_image(lat).astype(np.float64)
    if x.shape[2] != DECODER_CHANNELS[0]:
        raise InvalidArgumentError(f'latent must have {DECODER_CHANNELS[0]} channels, got {x.shape[2]}')
    weights = weights or default_weights()
    for k, kernel in enumerate(weights.decoder):
        x = np.repeat(np.repeat(x, 2, axis=0), 2, axis=1)
        x = conv3x3(x, kernel, 1, mode)
        if k < 2:
            x = np.tanh(x)
    return x


def circular_encode(erp, w_prime: Optional[int] = None, weights: Optional[CodecWeights] = None) -> np.ndarray:
    """
    Circular Latent Encoding.

    Pads w' columns from the opposite side onto each border in pixel space,
    encodes with zero padding and drops the w'/8 latent columns that belong
    to the padding. The latent width stays W/8.
    """
    x = as_image(erp)
    W = x.shape[1]
    if w_prime is None:
        w_prime = W // 8
    if w_prime < 0 or w_prime % LATENT_FACTOR:
        raise InvalidArgumentError(f'w_prime must be a non-negative multiple of {LATENT_FACTOR}, got {w_prime}')
    padded = np.pad(x, ((0, 0), (w_prime, w_prime), (0, 0)), mode='wrap')
    lat = encode(padded, PaddingMode.ZERO, weights)
    drop = w_prime // LATENT_FACTOR
    logger.debug('Circular encode: padded width %d, dropping %d latent columns per side',
                 padded.shape[1], drop)
    return lat[:, drop:lat.shape[1] - drop]


def circular_decode(lat, p: int = DEFAULT_DECODE_PAD, weights: Optional[CodecWeights] = None) -> np.ndarray:
    """Pads the latent circularly by p columns, decodes with zero padding, crops 8p pixels per side."""
    x = as_image(lat)
    Wl = x.shape[1]
    if p < 0 or p > Wl:
        raise InvalidArgumentError(f'pad {p} must lie in [0, {Wl}]')
    padded = np.pad(x, ((0, 0), (p, p), (0, 0)), mode='wrap')
    img = decode(padded, PaddingMode.ZERO, weights)
    crop = LATENT_FACTOR * p
    return img[:, crop:img.shape[1] - crop]


def shift_columns(grid, k: int) -> np.ndarray:
    """Circular shift of columns by k (positive moves content right)."""
    return np.roll(np.asarray(grid), k, axis=1)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise InvalidArgumentError(f'shape mismatch: {a.shape} vs {b.shape}')


def flow_interpolate(Y, eps, t: float) -> np.ndarray:
    """Noisy sample at time t: (1 - t) * Y + t * eps."""
    Y = np.asarray(Y, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    _check_same_shape(Y, eps)
    if not 0.0 <= t <= 1.0:
        raise InvalidArgumentError(f't must lie in [0, 1], got {t}')
    if t == 0.0:
        return Y.copy()
    if t == 1.0:
        return eps.copy()
    return (1.0 - t) * Y + t * eps


def velocity_target(Y, eps) -> np.ndarray:
    """Regression target of the flow: eps - Y."""
    Y = np.asarray(Y, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    _check_same_shape(Y, eps)
    return eps - Y
