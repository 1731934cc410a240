import numpy as np
import pytest

from panolift.exceptions import InvalidArgumentError
from panolift.schema import AugmentationRanges, CameraParams, wrap_degrees
from panolift.sphere import (check_erp, dir_to_erp, erp_dir, minimal_rotation_between, rotate_vectors,
                             rotation_from_angles, rotation_from_ypr, sample_camera, ypr_from_rotation)
from panolift.utils.splitmix import SplitMix64


def test_erp_dir_pixel_centres():
    np.testing.assert_allclose(erp_dir(0, 1, 2, 4), [-0.5, np.sqrt(0.5), 0.5], atol=1e-5)
    np.testing.assert_allclose(erp_dir(255.5, 511.5, 512, 1024), [0.0, 0.0, 1.0], atol=1e-12)
    for j in (0.0, 3.3, 100.0):
        np.testing.assert_allclose(erp_dir(-0.5, j, 512, 1024), [0.0, 1.0, 0.0], atol=1e-6)


def test_erp_dir_wraps_columns():
    np.testing.assert_allclose(erp_dir(10, 5, 64, 128), erp_dir(10, 5 + 128, 64, 128), atol=1e-12)


def test_erp_dir_rejects_bad_dims():
    with pytest.raises(InvalidArgumentError):
        erp_dir(0, 0, 0, 4)


def test_dir_to_erp_examples():
    i, j = dir_to_erp([0.0, 0.0, 1.0], 512, 1024)
    assert (float(i), float(j)) == pytest.approx((255.5, 511.5))
    i, j = dir_to_erp([1.0, 0.0, 0.0], 512, 1024)
    assert (float(i), float(j)) == pytest.approx((255.5, 767.5))


def test_dir_to_erp_round_trip():
    gen = np.random.default_rng(0)
    d = gen.normal(size=(10000, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    H, W = 512, 1024
    i, j = dir_to_erp(d, H, W)
    assert np.all((j >= -0.5) & (j < W - 0.5))
    i2, j2 = dir_to_erp(erp_dir(i, j, H, W), H, W)
    dj = np.abs(j2 - j)
    dj = np.minimum(dj, W - dj)
    assert np.max(np.abs(i2 - i)) < 1e-4
    assert np.max(dj) < 1e-4


def test_dir_to_erp_zero_vector():
    with pytest.raises(InvalidArgumentError):
        dir_to_erp([0.0, 0.0, 0.0], 4, 8)


def test_rotation_conventions():
    np.testing.assert_array_equal(rotation_from_angles(0, 0, 0), np.eye(3))
    np.testing.assert_allclose(rotation_from_angles(90, 0, 0) @ [0, 0, 1], [1, 0, 0], atol=1e-12)
    # positive pitch looks up
    assert (rotation_from_angles(0, 30, 0) @ [0, 0, 1])[1] > 0
    R = rotation_from_angles(10, 20, 5)
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-6)
    assert np.linalg.det(R) == pytest.approx(1.0)


def test_yaw_rotations_compose_additively():
    gen = np.random.default_rng(4)
    for a, b in gen.uniform(-180, 180, size=(20, 2)):
        np.testing.assert_allclose(rotation_from_angles(a, 0, 0) @ rotation_from_angles(b, 0, 0),
                                   rotation_from_angles(a + b, 0, 0), atol=1e-12)


def test_rotation_batch_matches_single():
    yaws = np.array([0.0, 15.0, -120.0])
    pitches = np.array([5.0, -40.0, 80.0])
    rolls = np.array([1.0, 12.0, -3.0])
    batch = rotation_from_angles(yaws, pitches, rolls)
    assert batch.shape == (3, 3, 3)
    for k in range(3):
        np.testing.assert_allclose(batch[k], rotation_from_angles(yaws[k], pitches[k], rolls[k]), atol=1e-14)


def test_ypr_round_trip():
    cam = CameraParams(fov_deg=70, yaw_deg=-135.0, pitch_deg=25.0, roll_deg=-8.0)
    yaw, pitch, roll = ypr_from_rotation(rotation_from_ypr(cam))
    assert (yaw, pitch, roll) == pytest.approx((-135.0, 25.0, -8.0), abs=1e-9)


def test_rotate_vectors_batch_is_elementwise():
    R = rotation_from_angles([10.0, 50.0], [5.0, -5.0], [0.0, 2.0])
    v = np.random.default_rng(1).normal(size=(4, 5, 3))
    batch = rotate_vectors(R, v)
    assert batch.shape == (2, 4, 5, 3)
    np.testing.assert_array_equal(batch[1], rotate_vectors(R[1], v))


def test_minimal_rotation_identity():
    np.testing.assert_array_equal(minimal_rotation_between([0, -1, 0], [0, -1, 0]), np.eye(3))


def test_minimal_rotation_quarter_turn():
    a, b = np.array([0.0, 0.0, -1.0]), np.array([0.0, -1.0, 0.0])
    R = minimal_rotation_between(a, b)
    np.testing.assert_allclose(R @ a, b, atol=1e-12)
    # about the X axis
    np.testing.assert_allclose(R @ [1, 0, 0], [1, 0, 0], atol=1e-12)


def test_minimal_rotation_random_pairs():
    gen = np.random.default_rng(2)
    for _ in range(50):
        a, b = gen.normal(size=(2, 3))
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        Ra = minimal_rotation_between(a, b) @ a
        assert np.arccos(np.clip(Ra @ b, -1, 1)) < 1e-6


def test_minimal_rotation_antiparallel():
    for a in ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]):
        a = np.array(a)
        R = minimal_rotation_between(a, -a)
        np.testing.assert_allclose(R @ a, -a, atol=1e-12)
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)


def test_sample_camera_inside_ranges():
    rng = SplitMix64(3)
    ranges = AugmentationRanges()
    for _ in range(10000):
        cam = sample_camera(rng, ranges)
        assert 30 <= cam.fov_deg <= 120
        assert -60 <= cam.pitch_deg <= 60
        assert -15 <= cam.roll_deg <= 15


def test_sample_camera_fov_is_uniform():
    rng = SplitMix64(21)
    fovs = [sample_camera(rng).fov_deg for _ in range(100_000)]
    assert abs(np.mean(fovs) - 75.0) < 1.0


def test_sample_camera_degenerate_ranges():
    ranges = AugmentationRanges(fov=(90, 90), pitch=(0, 0), roll=(0, 0))
    cam = sample_camera(SplitMix64(1), ranges)
    assert (cam.fov_deg, cam.pitch_deg, cam.roll_deg) == (90, 0, 0)
    assert -180 < cam.yaw_deg <= 180


def test_sample_camera_is_deterministic():
    assert sample_camera(SplitMix64(11)) == sample_camera(SplitMix64(11))


def test_wrap_degrees():
    assert wrap_degrees(180.0) == 180.0
    assert wrap_degrees(-180.0) == 180.0
    assert wrap_degrees(190.0) == pytest.approx(-170.0)
    assert wrap_degrees(725.0) == pytest.approx(5.0)
    assert wrap_degrees(12.5) == 12.5


def test_check_erp_shapes():
    with pytest.raises(InvalidArgumentError):
        check_erp(np.zeros((4, 6)))
    with pytest.raises(InvalidArgumentError):
        check_erp(np.zeros((4, 8, 2)))
    assert check_erp(np.zeros((4, 8))).shape == (4, 8, 1)


def test_camera_params_validation():
    with pytest.raises(ValueError):
        CameraParams(fov_deg=0)
    with pytest.raises(ValueError):
        CameraParams(fov_deg=90, pitch_deg=91)
    assert CameraParams(yaw_deg=270).yaw_deg == pytest.approx(-90.0)
