import json
import re
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from panolift.config import DEFAULT_SIM_PROB
from panolift.exceptions import FormatError, InvalidArgumentError
from panolift.fileio import atomic_write_text
from panolift.logging_config import logger
from panolift.projection import pano2pers
from panolift.schema.camera import CameraParams, wrap_degrees
from panolift.schema.configs import SimConfig
from panolift.schema.files import TrajectoryFile
from panolift.schema.trajectory import Trajectory
from panolift.sphere import sample_camera
from panolift.utils.splitmix import SplitMix64

_SPACE = re.compile(r'\s*')
_COMMA = re.compile(r'\s*,')


def simulate_trajectory(cfg: SimConfig) -> Trajectory:
    """
    Linear camera motion plus per-frame Gaussian jitter.

    Draw order: frame-0 camera (fov, yaw, pitch, roll), then velocities
    (yaw, pitch, roll), then for every frame k >= 1 the noise of yaw, pitch
    and roll. Pitch and roll are clamped to their ranges, yaw is wrapped.
    """
    rng = SplitMix64(cfg.seed)
    ranges = cfg.ranges
    first = sample_camera(rng, ranges)
    velocity = (rng.uniform_range(-cfg.yaw_rate, cfg.yaw_rate),
                rng.uniform_range(-cfg.pitch_rate, cfg.pitch_rate),
                rng.uniform_range(-cfg.roll_rate, cfg.roll_rate))
    logger.debug('Simulating %d frames, velocity %s deg/frame', cfg.frames, velocity)
    cameras = [first]
    clamped = 0
    for k in range(1, cfg.frames):
        noise = [rng.gaussian(cfg.noise_std) for _ in range(3)]
        yaw = first.yaw_deg + k * velocity[0] + noise[0]
        raw_pitch = first.pitch_deg + k * velocity[1] + noise[1]
        raw_roll = first.roll_deg + k * velocity[2] + noise[2]
        pitch = float(np.clip(raw_pitch, *ranges.pitch))
        roll = float(np.clip(raw_roll, *ranges.roll))
        clamped += int(pitch != raw_pitch or roll != raw_roll)
        cameras.append(CameraParams(fov_deg=first.fov_deg, yaw_deg=wrap_degrees(yaw),
                                    pitch_deg=pitch, roll_deg=roll))
    if clamped:
        logger.warning('Clamped pitch or roll on %d of %d simulated frames', clamped, cfg.frames)
    return Trajectory(cameras=cameras, source='simulated')


def _frame_line(text: str, index: int, tagged: bool) -> Optional[int]:
    """1-based line on which frame `index` starts, or None when it cannot be located."""
    match = re.search(r'"frames"\s*:\s*\[', text) if tagged else re.search(r'\[', text)
    if match is None:
        return None
    decoder = json.JSONDecoder()
    pos = match.end()
    try:
        for _ in range(index):
            pos = _SPACE.match(text, pos).end()
            _, pos = decoder.raw_decode(text, pos)
            pos = _COMMA.match(text, pos).end()
    except (ValueError, AttributeError):
        return None
    pos = _SPACE.match(text, pos).end()
    return text.count('\n', 0, pos) + 1


def load_trajectory(path) -> Trajectory:
    """Reads a trajectory JSON file; untagged files are tagged real."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise FormatError(path, f'cannot read trajectory: {exc}') from exc
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(path, f'invalid JSON: {exc.msg}', line=exc.lineno) from exc
    if not isinstance(value, (list, dict)):
        raise FormatError(path, 'expected a JSON array or object')
    try:
        traj = TrajectoryFile.from_json_value(value).to_trajectory()
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = first['loc']
        where = '.'.join(str(part) for part in loc)
        line = None
        if len(loc) >= 2 and loc[0] == 'frames' and isinstance(loc[1], int):
            where = f'frame {loc[1]} ({where})'
            line = _frame_line(text, loc[1], isinstance(value, dict))
        raise FormatError(path, f'invalid trajectory at {where}: {first["msg"]}', line=line) from exc
    logger.info('Loaded %s trajectory of %d frames from %s', traj.source, len(traj), path)
    return traj


def save_trajectory(traj: Trajectory, path) -> None:
    doc = TrajectoryFile(source=traj.source, frames=traj.cameras)
    atomic_write_text(path, doc.model_dump_json(indent=2))


def choose_trajectory(rng: SplitMix64, cfg: SimConfig, real_pool: Sequence[Trajectory] = (),
                      sim_prob: float = DEFAULT_SIM_PROB) -> Trajectory:
    """Simulated with probability `sim_prob`, else a real trajectory drawn from `real_pool`."""
    if not 0.0 <= sim_prob <= 1.0:
        raise InvalidArgumentError(f'sim_prob must lie in [0, 1], got {sim_prob}')
    if not real_pool or rng.uniform() < sim_prob:
        return simulate_trajectory(cfg)
    return real_pool[rng.randint(0, len(real_pool) - 1)]


def crop_video(erp_frames: Sequence, traj: Trajectory, h: int, w: int) -> List[np.ndarray]:
    """Perspective conditioning video: frame k is pano2pers(erp_k, traj_k)."""
    if len(erp_frames) != len(traj):
        raise InvalidArgumentError(f'{len(erp_frames)} frames but trajectory has {len(traj)}')
    return [pano2pers(frame, cam, h, w) for frame, cam in zip(erp_frames, traj.cameras)]
