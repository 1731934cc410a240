"""
Command-line surface: `python -m panolift <command> ...`.

Exit codes: 0 success, 1 usage error, 2 data or format error.
"""
import argparse
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from panolift.calibrate import calibrate
from panolift.canonicalize import canonicalize_video
from panolift.codec import PaddingMode, circular_decode, circular_encode, decode, encode
from panolift.config import (CUBE_FACES, DEFAULT_DECODE_PAD, DEFAULT_MAX_RATES, DEFAULT_NOISE_STD,
                             DEFAULT_RENDER_SIZE, DEFAULT_SIM_PROB)
from panolift.exceptions import InvalidArgumentError, PanoliftError, UsageError
from panolift.fileio import (PNG_SUFFIX, TENSOR_SUFFIX, atomic_write_text, read_frames, read_image,
                             read_pose_gravity, read_tensor, write_frames, write_image, write_tensor)
from panolift.logging_config import configure_logging, logger
from panolift.metrics import discontinuity_score, latent_equivariance_error, masked_psnr
from panolift.projection import CubeMap, cubemap_to_erp, erp_to_cubemap, pano2pers, pers2pano, rotate_erp
from panolift.schema.camera import AugmentationRanges, CameraParams
from panolift.schema.configs import SearchConfig, SimConfig
from panolift.sphere import rotation_from_angles
from panolift.trajectory import choose_trajectory, crop_video, load_trajectory, save_trajectory
from panolift.utils.checks import is_rotation
from panolift.utils.splitmix import SplitMix64


class PanoliftArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so run_command owns the exit code."""

    def error(self, message):
        raise UsageError(f'{self.prog}: {message}')


def _size(text: str) -> Tuple[int, int]:
    """'WIDTHxHEIGHT' -> (height, width)."""
    try:
        w, h = (int(part) for part in text.lower().split('x'))
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected WIDTHxHEIGHT, got {text!r}')
    if w < 2 or h < 2:
        raise argparse.ArgumentTypeError(f'size must be at least 2x2, got {text!r}')
    return h, w


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected an integer, got {text!r}')
    if value < 0:
        raise argparse.ArgumentTypeError(f'must be non-negative, got {value}')
    return value


def _positive(text: str) -> int:
    value = _non_negative(text)
    if value == 0:
        raise argparse.ArgumentTypeError('must be positive, got 0')
    return value


def _matrix(text: str) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError('matrix must be 9 comma-separated numbers')
    if len(values) != 9:
        raise argparse.ArgumentTypeError(f'matrix needs 9 values, got {len(values)}')
    return np.array(values, dtype=np.float64).reshape(3, 3)


def _build(model, **fields):
    """Builds a pydantic model from flag values, reporting violations as bad arguments."""
    try:
        return model(**fields)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = '.'.join(str(part) for part in first['loc']) or model.__name__
        raise InvalidArgumentError(f'{where}: {first["msg"]}') from exc


def _camera(args) -> CameraParams:
    return _build(CameraParams, fov_deg=args.fov, yaw_deg=args.yaw, pitch_deg=args.pitch, roll_deg=args.roll)


def _add_camera_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--fov', type=float, required=True, help='Horizontal field of view, degrees')
    parser.add_argument('--yaw', type=float, default=0.0)
    parser.add_argument('--pitch', type=float, default=0.0)
    parser.add_argument('--roll', type=float, default=0.0)


def _find_face(directory: Path, name: str) -> Path:
    for suffix in (PNG_SUFFIX, TENSOR_SUFFIX):
        path = directory / f'{name}{suffix}'
        if path.exists():
            return path
    raise InvalidArgumentError(f'{directory}: missing face {name!r}')


# ---- commands ---------------------------------------------------------------

def cmd_project(args) -> int:
    h, w = args.size
    write_image(pano2pers(read_image(args.erp), _camera(args), h, w), args.out)
    return 0


def cmd_unproject(args) -> int:
    result = pers2pano(read_image(args.pers), _camera(args), args.height, 2 * args.height)
    write_image(result.image, args.out)
    if args.mask_out:
        write_image(result.mask.astype(np.float64), args.mask_out)
    return 0


def cmd_rotate(args) -> int:
    if args.matrix is not None:
        if not is_rotation(args.matrix):
            raise InvalidArgumentError('--matrix is not a rotation matrix')
        R = args.matrix
    else:
        R = rotation_from_angles(args.yaw, args.pitch, args.roll)
    write_image(rotate_erp(read_image(args.erp), R), args.out)
    return 0


def cmd_cube(args) -> int:
    if args.erp and args.faces_dir:
        raise UsageError('cube: use either --erp or --faces-dir, not both')
    if args.erp:
        if args.face_size is None or args.out_dir is None:
            raise UsageError('cube: --erp needs --face-size and --out-dir')
        cube = erp_to_cubemap(read_image(args.erp), args.face_size)
        out_dir = Path(args.out_dir)
        for name, face in cube.faces().items():
            write_image(face, out_dir / f'{name}{args.suffix}')
        return 0
    if args.faces_dir:
        if args.height is None or args.out is None:
            raise UsageError('cube: --faces-dir needs --height and --out')
        directory = Path(args.faces_dir)
        cube = CubeMap(**{name: read_image(_find_face(directory, name)) for name in CUBE_FACES})
        write_image(cubemap_to_erp(cube, args.height, 2 * args.height), args.out)
        return 0
    raise UsageError('cube: one of --erp or --faces-dir is required')


def cmd_canonicalize(args) -> int:
    frames = read_frames(args.frames_dir)
    doc = read_pose_gravity(args.poses)
    out = canonicalize_video(frames, doc.rotations(), doc.gravity_vectors(), workers=args.workers)
    write_frames(out, args.out_dir, suffix=args.suffix)
    return 0


def cmd_calibrate(args) -> int:
    cfg = _build(SearchConfig, render_size=args.render_size, search_yaw=args.search_yaw)
    result = calibrate(read_image(args.pers), read_image(args.erp), cfg, workers=args.workers)
    logger.info('Recovered camera %s', result.camera)
    text = result.model_dump_json(indent=2)
    if args.json:
        atomic_write_text(args.json, text)
    else:
        print(text)
    return 0


def cmd_seam_score(args) -> int:
    print(f'{discontinuity_score(read_image(args.erp)):.6f}')
    return 0


def cmd_encode(args) -> int:
    img = read_image(args.image)
    if args.mode == 'cle':
        lat = circular_encode(img, args.wprime)
    else:
        if args.wprime is not None:
            raise UsageError('encode: --wprime only applies to --mode cle')
        lat = encode(img, PaddingMode(args.mode))
    write_tensor(lat, args.out)
    return 0


def cmd_decode(args) -> int:
    lat = read_tensor(args.latent)
    if lat.ndim != 3:
        raise InvalidArgumentError(f'{args.latent}: latent must be rank 3, got {lat.ndim}')
    if args.mode == 'cle':
        img = circular_decode(lat, args.pad)
    else:
        img = decode(lat, PaddingMode(args.mode))
    write_image(img, args.out)
    return 0


def cmd_simulate_traj(args) -> int:
    ranges = _build(AugmentationRanges, fov=tuple(args.fov_range), pitch=tuple(args.pitch_range),
                    roll=tuple(args.roll_range), yaw=tuple(args.yaw_range))
    pool = [load_trajectory(path) for path in args.real]
    rng = SplitMix64(args.seed)
    # with a real pool the choice and the simulation draw from separate streams
    sim_seed = rng.next_u64() if pool else args.seed
    cfg = _build(SimConfig, frames=args.frames, ranges=ranges, yaw_rate=args.yaw_rate,
                 pitch_rate=args.pitch_rate, roll_rate=args.roll_rate, noise_std=args.noise, seed=sim_seed)
    traj = choose_trajectory(rng, cfg, pool, args.sim_prob)
    save_trajectory(traj, args.out)
    logger.info('Wrote %s trajectory (%d frames) to %s', traj.source, len(traj), args.out)
    return 0


def cmd_crop(args) -> int:
    h, w = args.size
    frames = crop_video(read_frames(args.frames_dir), load_trajectory(args.traj), h, w)
    write_frames(frames, args.out_dir, suffix=args.suffix)
    return 0


def cmd_mask_psnr(args) -> int:
    h, w = args.size
    report = masked_psnr(read_frames(args.gt_dir), read_frames(args.gen_dir), load_trajectory(args.traj), h, w)
    if args.json:
        atomic_write_text(args.json, report.model_dump_json(indent=2))
    print(f'{report.value:.6f}')
    return 0


def cmd_equivariance(args) -> int:
    print(f'{latent_equivariance_error(read_image(args.erp), use_cle=args.mode == "cle"):.9g}')
    return 0


# ---- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = PanoliftArgumentParser(prog='panolift', description='360-degree panorama geometry toolkit.')
    parser.add_argument('--seed', type=_non_negative, default=0, help='Seed for every randomised command')
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    parser.add_argument('--log-file', default=None)
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('project', help='Perspective crop of an ERP')
    p.add_argument('--erp', required=True)
    _add_camera_flags(p)
    p.add_argument('--size', type=_size, required=True, help='WIDTHxHEIGHT')
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_project)

    p = sub.add_parser('unproject', help='Splat a perspective image into ERP layout')
    p.add_argument('--pers', required=True)
    _add_camera_flags(p)
    p.add_argument('--height', type=int, required=True, help='ERP height; width is twice this')
    p.add_argument('--out', required=True)
    p.add_argument('--mask-out', default=None)
    p.set_defaults(handler=cmd_unproject)

    p = sub.add_parser('rotate', help='Rotate a full panorama')
    p.add_argument('--erp', required=True)
    p.add_argument('--yaw', type=float, default=0.0)
    p.add_argument('--pitch', type=float, default=0.0)
    p.add_argument('--roll', type=float, default=0.0)
    p.add_argument('--matrix', type=_matrix, default=None, help='Row-major 3x3 rotation, comma separated')
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_rotate)

    p = sub.add_parser('cube', help='ERP to cube faces or back')
    p.add_argument('--erp', default=None)
    p.add_argument('--face-size', type=int, default=None)
    p.add_argument('--out-dir', default=None)
    p.add_argument('--suffix', choices=[PNG_SUFFIX, TENSOR_SUFFIX], default=PNG_SUFFIX)
    p.add_argument('--faces-dir', default=None)
    p.add_argument('--height', type=int, default=None)
    p.add_argument('--out', default=None)
    p.set_defaults(handler=cmd_cube)

    p = sub.add_parser('canonicalize', help='Stabilise and gravity-align a frame sequence')
    p.add_argument('--frames-dir', required=True)
    p.add_argument('--poses', required=True, help='JSON with "poses" and optional "gravity"')
    p.add_argument('--out-dir', required=True)
    p.add_argument('--workers', type=_positive, default=1)
    p.add_argument('--suffix', choices=[PNG_SUFFIX, TENSOR_SUFFIX], default=PNG_SUFFIX)
    p.set_defaults(handler=cmd_canonicalize)

    p = sub.add_parser('calibrate', help='Recover the camera of a perspective view')
    p.add_argument('--pers', required=True)
    p.add_argument('--erp', required=True)
    p.add_argument('--json', default=None)
    p.add_argument('--render-size', type=int, default=DEFAULT_RENDER_SIZE)
    p.add_argument('--search-yaw', action='store_true')
    p.add_argument('--workers', type=_positive, default=1)
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser('seam-score', help='Print the wrap-seam discontinuity score')
    p.add_argument('--erp', required=True)
    p.set_defaults(handler=cmd_seam_score)

    p = sub.add_parser('encode', help='Encode an image to a latent tensor')
    p.add_argument('--image', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--mode', choices=['zero', 'circular', 'cle'], default='zero')
    p.add_argument('--wprime', type=int, default=None, help='CLE padding width in pixels')
    p.set_defaults(handler=cmd_encode)

    p = sub.add_parser('decode', help='Decode a latent tensor to an image')
    p.add_argument('--latent', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--mode', choices=['zero', 'circular', 'cle'], default='zero')
    p.add_argument('--pad', type=int, default=DEFAULT_DECODE_PAD, help='Latent columns padded for cle')
    p.set_defaults(handler=cmd_decode)

    p = sub.add_parser('simulate-traj', help='Simulate or pick a camera trajectory')
    p.add_argument('--frames', type=int, default=16)
    defaults = AugmentationRanges()
    p.add_argument('--fov-range', type=float, nargs=2, default=list(defaults.fov), metavar=('LO', 'HI'))
    p.add_argument('--pitch-range', type=float, nargs=2, default=list(defaults.pitch), metavar=('LO', 'HI'))
    p.add_argument('--roll-range', type=float, nargs=2, default=list(defaults.roll), metavar=('LO', 'HI'))
    p.add_argument('--yaw-range', type=float, nargs=2, default=list(defaults.yaw), metavar=('LO', 'HI'))
    p.add_argument('--yaw-rate', type=float, default=DEFAULT_MAX_RATES['yaw'])
    p.add_argument('--pitch-rate', type=float, default=DEFAULT_MAX_RATES['pitch'])
    p.add_argument('--roll-rate', type=float, default=DEFAULT_MAX_RATES['roll'])
    p.add_argument('--noise', type=float, default=DEFAULT_NOISE_STD)
    p.add_argument('--real', action='append', default=[], help='Real trajectory file (repeatable)')
    p.add_argument('--sim-prob', type=float, default=DEFAULT_SIM_PROB)
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_simulate_traj)

    p = sub.add_parser('crop', help='Perspective conditioning video from ERP frames')
    p.add_argument('--frames-dir', required=True)
    p.add_argument('--traj', required=True)
    p.add_argument('--size', type=_size, required=True, help='WIDTHxHEIGHT')
    p.add_argument('--out-dir', required=True)
    p.add_argument('--suffix', choices=[PNG_SUFFIX, TENSOR_SUFFIX], default=PNG_SUFFIX)
    p.set_defaults(handler=cmd_crop)

    p = sub.add_parser('mask-psnr', help='PSNR inside the region the trajectory saw')
    p.add_argument('--gt-dir', required=True)
    p.add_argument('--gen-dir', required=True)
    p.add_argument('--traj', required=True)
    p.add_argument('--size', type=_size, required=True, help='Crop WIDTHxHEIGHT used by the trajectory')
    p.add_argument('--json', default=None)
    p.set_defaults(handler=cmd_mask_psnr)

    p = sub.add_parser('equivariance', help='Latent shift-equivariance error')
    p.add_argument('--erp', required=True)
    p.add_argument('--mode', choices=['zero', 'cle'], default='cle')
    p.set_defaults(handler=cmd_equivariance)
    return parser


# Most specific first; mirrors a per-exception handler registry
EXCEPTION_HANDLERS: List[Tuple[type, Callable[[BaseException], int]]] = [
    (PanoliftError, lambda exc: exc.exit_code),
    (ValidationError, lambda exc: 2),
    (ValueError, lambda exc: 2),
]


def _handle(exc: BaseException) -> Optional[int]:
    for exc_type, handler in EXCEPTION_HANDLERS:
        if isinstance(exc, exc_type):
            print(f'panolift: error: {exc}', file=sys.stderr)
            return handler(exc)
    return None


def run_command(argv: Sequence[str]) -> int:
    """Parses `argv`, runs the command and returns its exit code."""
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as exc:
        return _handle(exc)
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)
    configure_logging(args.log_level, args.log_file)
    logger.debug('Running %s', args.command)
    try:
        return args.handler(args)
    except Exception as exc:
        code = _handle(exc)
        if code is None:
            raise
        return code


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
