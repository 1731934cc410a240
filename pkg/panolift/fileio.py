"""
Image, tensor and frame-directory I/O.

Raw tensor layout (`.pten`): magic b'PTEN', u32 LE rank, rank x u32 LE dims,
then float32 LE payload in row-major order.
"""
import json
import os
import struct
import tempfile
from io import BytesIO
from pathlib import Path
from typing import List, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError
from pydantic import ValidationError

from panolift.config import FRAME_PATTERN
from panolift.exceptions import FormatError
from panolift.logging_config import logger
from panolift.schema.files import PoseGravityFile

MAGIC = b'PTEN'
TENSOR_SUFFIX = '.pten'
PNG_SUFFIX = '.png'
PNG_SIGNATURE = b'\x89PNG\r\n\x1a\n'


def _atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(path, text.encode('utf-8'))


def write_tensor(arr, path) -> None:
    arr = np.ascontiguousarray(arr, dtype='<f4')
    if not 1 <= arr.ndim <= 4:
        raise FormatError(path, f'tensor rank must be 1..4, got {arr.ndim}')
    header = MAGIC + struct.pack(f'<I{arr.ndim}I', arr.ndim, *arr.shape)
    _atomic_write_bytes(path, header + arr.tobytes())


def read_tensor(path) -> np.ndarray:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FormatError(path, f'cannot read tensor: {exc}') from exc
    if len(data) < 8 or data[:4] != MAGIC:
        raise FormatError(path, 'missing PTEN magic')
    (rank,) = struct.unpack_from('<I', data, 4)
    if not 1 <= rank <= 4:
        raise FormatError(path, f'tensor rank must be 1..4, got {rank}')
    offset = 8 + 4 * rank
    if len(data) < offset:
        raise FormatError(path, 'truncated tensor header')
    dims = struct.unpack_from(f'<{rank}I', data, 8)
    expected = int(np.prod(dims, dtype=np.int64)) * 4
    if len(data) - offset != expected:
        raise FormatError(path, f'payload is {len(data) - offset} bytes, dims {dims} need {expected}')
    return np.frombuffer(data, dtype='<f4', offset=offset).reshape(dims).astype(np.float32)


def _check_png_depth(path: Path) -> None:
    # IHDR bit depth sits at byte 24; Pillow would silently narrow 16-bit RGB
    try:
        with open(path, 'rb') as fh:
            head = fh.read(26)
    except OSError as exc:
        raise FormatError(path, f'cannot read image: {exc}') from exc
    if len(head) < 26 or head[:8] != PNG_SIGNATURE or head[12:16] != b'IHDR':
        raise FormatError(path, 'not a PNG file')
    if head[24] != 8:
        raise FormatError(path, f'only 8-bit PNG is supported, got {head[24]}-bit')


def read_image(path) -> np.ndarray:
    """Reads an 8-bit PNG (mapped to [0, 1]) or a raw tensor, as H x W x C."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == TENSOR_SUFFIX:
        arr = read_tensor(path)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise FormatError(path, f'image tensors must be rank 2 or 3, got {arr.ndim}')
        return arr
    if suffix != PNG_SUFFIX:
        raise FormatError(path, f'unsupported image format {suffix or "(none)"}')
    _check_png_depth(path)
    try:
        with Image.open(path) as im:
            if im.format != 'PNG':
                raise FormatError(path, f'not a PNG file ({im.format})')
            if im.mode not in ('L', 'RGB'):
                raise FormatError(path, f'only 8-bit grey or RGB PNG is supported, got mode {im.mode}')
            arr = np.asarray(im, dtype=np.uint8)
    except (OSError, UnidentifiedImageError) as exc:
        raise FormatError(path, f'corrupt image: {exc}') from exc
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr.astype(np.float64) / 255.0


def to_uint8(img) -> np.ndarray:
    """Clamps to [0, 1] and rounds half-to-even onto 0..255."""
    return np.rint(np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def write_image(img, path) -> None:
    path = Path(path)
    arr = np.asarray(img)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    suffix = path.suffix.lower()
    if suffix == TENSOR_SUFFIX:
        write_tensor(arr, path)
        return
    if suffix != PNG_SUFFIX:
        raise FormatError(path, f'unsupported image format {suffix or "(none)"}')
    if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
        raise FormatError(path, f'PNG output needs 1 or 3 channels, got shape {arr.shape}')
    pixels = to_uint8(arr)
    buffer = Image.fromarray(pixels)
    out = BytesIO()
    buffer.save(out, format='PNG')
    _atomic_write_bytes(path, out.getvalue())
    logger.debug('Wrote %s %s', path, arr.shape)


def frame_paths(directory) -> List[Path]:
    """Numbered frame files (frame_0000.png / .pten) in order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FormatError(directory, 'frame directory does not exist')
    paths = sorted(p for p in directory.glob('frame_*') if p.suffix.lower() in (PNG_SUFFIX, TENSOR_SUFFIX))
    if not paths:
        raise FormatError(directory, 'no frame_NNNN files found')
    return paths


def read_frames(directory) -> List[np.ndarray]:
    return [read_image(p) for p in frame_paths(directory)]


def write_frames(frames: Sequence, directory, suffix: str = PNG_SUFFIX) -> List[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, frame in enumerate(frames):
        path = directory / (FRAME_PATTERN.format(k) + suffix)
        write_image(frame, path)
        paths.append(path)
    logger.info('Wrote %d frames to %s', len(paths), directory)
    return paths


def read_pose_gravity(path) -> PoseGravityFile:
    path = Path(path)
    try:
        value = json.loads(path.read_text(encoding='utf-8'))
    except OSError as exc:
        raise FormatError(path, f'cannot read pose file: {exc}') from exc
    except json.JSONDecodeError as exc:
        raise FormatError(path, f'invalid JSON: {exc.msg}', line=exc.lineno) from exc
    if not isinstance(value, dict):
        raise FormatError(path, 'expected a JSON object with "poses"')
    try:
        return PoseGravityFile(**value)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = '.'.join(str(part) for part in first['loc'])
        raise FormatError(path, f'invalid pose file at {where}: {first["msg"]}') from exc
