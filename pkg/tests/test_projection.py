import time

import numpy as np
import pytest

from panolift.exceptions import InvalidArgumentError
from panolift.metrics import discontinuity_score
from panolift.projection import (CubeMap, camera_rays, cardinal_views, cubemap_to_erp, erp_to_cubemap, eval_crops,
                                 horizon_views, pano2pers, pano2pers_batch, pers2pano, projection_mask, rotate_erp,
                                 sample_conditioning_crop, sample_erp)
from panolift.schema import CameraParams
from panolift.sphere import erp_grid, rotate_vectors, rotation_from_angles, rotation_from_ypr
from panolift.utils.splitmix import SplitMix64


def test_sample_erp_wraps_horizontally():
    erp = np.zeros((2, 4, 1))
    erp[:, 0] = 1.0
    erp[:, 3] = 3.0
    assert sample_erp(erp, 0.0, 3.5)[0] == pytest.approx(2.0)
    assert sample_erp(erp, 0.0, -0.5)[0] == pytest.approx(2.0)


def test_sample_erp_integer_offset_is_a_shift(sinusoid_erp):
    H, W = sinusoid_erp.shape[:2]
    i, j = np.meshgrid(np.arange(H, dtype=float), np.arange(W, dtype=float), indexing='ij')
    np.testing.assert_array_equal(sample_erp(sinusoid_erp, i, j, 3.0), np.roll(sinusoid_erp, -3, axis=1))


def test_sample_erp_clamps_vertically(sinusoid_erp):
    H = sinusoid_erp.shape[0]
    j = np.arange(sinusoid_erp.shape[1], dtype=float)
    np.testing.assert_array_equal(sample_erp(sinusoid_erp, np.full_like(j, -0.4), j), sinusoid_erp[0])
    np.testing.assert_array_equal(sample_erp(sinusoid_erp, np.full_like(j, H - 0.6), j), sinusoid_erp[H - 1])
    # halfway between rows 3 and 4, and between columns 5 and 6
    expected = sinusoid_erp[3:5, 5:7].mean(axis=(0, 1))
    np.testing.assert_allclose(sample_erp(sinusoid_erp, 3.5, 5.5), expected, atol=1e-12)


def test_pano2pers_constant():
    erp = np.full((32, 64, 1), 0.37)
    out = pano2pers(erp, CameraParams(fov_deg=75, yaw_deg=20, pitch_deg=-10, roll_deg=4), 16, 24)
    assert out.shape == (16, 24, 1)
    np.testing.assert_allclose(out, 0.37, atol=1e-12)


def test_pano2pers_centre_pixel():
    gen = np.random.default_rng(0)
    erp = gen.uniform(size=(32, 64, 3))
    out = pano2pers(erp, CameraParams(fov_deg=90), 5, 5)
    np.testing.assert_allclose(out[2, 2], erp[15:17, 31:33].mean(axis=(0, 1)), atol=1e-12)


@pytest.mark.parametrize('cam', [
    CameraParams(fov_deg=90),
    CameraParams(fov_deg=60, yaw_deg=130, pitch_deg=25, roll_deg=-10),
    CameraParams(fov_deg=100, yaw_deg=-170, pitch_deg=-45, roll_deg=7),
])
def test_pano2pers_matches_analytic_field(large_sinusoid_erp, sphere_field, cam):
    h, w = 96, 128
    out = pano2pers(large_sinusoid_erp, cam, h, w)
    dirs = rotate_vectors(rotation_from_ypr(cam), camera_rays(cam.fov_deg, h, w))
    assert np.mean(np.abs(out - sphere_field(dirs))) < 0.01


def test_pano2pers_yaw_step_is_column_shift(sinusoid_erp):
    W = sinusoid_erp.shape[1]
    base = CameraParams(fov_deg=80, pitch_deg=12, roll_deg=3)
    for k in (1, 5, 17):
        shifted = pano2pers(sinusoid_erp, base.with_yaw(k * 360.0 / W), 20, 30)
        np.testing.assert_array_equal(shifted, pano2pers(np.roll(sinusoid_erp, -k, axis=1), base, 20, 30))


def test_pano2pers_batch_matches_single(textured_erp):
    pitches = [-20.0, 0.0, 35.0]
    rolls = [5.0, -7.5, 0.0]
    batch = pano2pers_batch(textured_erp, 55.0, 40.0, pitches, rolls, 12, 16)
    assert batch.shape == (3, 12, 16, 3)
    for k in range(3):
        cam = CameraParams(fov_deg=55.0, yaw_deg=40.0, pitch_deg=pitches[k], roll_deg=rolls[k])
        np.testing.assert_array_equal(batch[k], pano2pers(textured_erp, cam, 12, 16))


def test_pano2pers_rejects_bad_inputs(sinusoid_erp):
    with pytest.raises(InvalidArgumentError):
        pano2pers(sinusoid_erp, CameraParams(), 1, 8)
    with pytest.raises(InvalidArgumentError):
        pano2pers(np.zeros((8, 10, 3)), CameraParams(), 4, 4)


def test_pers2pano_identity_centre():
    gen = np.random.default_rng(1)
    pers = gen.uniform(size=(9, 9, 3))
    result = pers2pano(pers, CameraParams(fov_deg=90), 64, 128)
    assert result.image.shape == (64, 128, 3)
    assert result.mask[31:33, 63:65].all()
    assert not result.mask[:, 0].any()
    assert not result.image[~result.mask].any()
    assert result.coverage_pixels == int(result.mask.sum())


def test_pers2pano_round_trip(large_sinusoid_erp):
    cam = CameraParams(fov_deg=90, yaw_deg=-60, pitch_deg=15, roll_deg=5)
    pers = pano2pers(large_sinusoid_erp, cam, 256, 256)
    result = pers2pano(pers, cam, 256, 512)
    assert result.mask.any()
    err = np.abs(result.image - large_sinusoid_erp)[result.mask]
    assert err.mean() < 0.01


def test_full_size_round_trip_is_fast(sphere_field):
    erp = sphere_field(erp_grid(1024, 2048))
    cam = CameraParams(fov_deg=90)
    start = time.perf_counter()
    pers = pano2pers(erp, cam, 512, 512)
    result = pers2pano(pers, cam, 1024, 2048)
    elapsed = time.perf_counter() - start
    assert np.abs(result.image - erp)[result.mask].mean() < 0.01
    assert elapsed < 5.0


def test_mask_area_grows_with_fov():
    areas = [int(pers2pano(np.ones((24, 24, 1)), CameraParams(fov_deg=fov, pitch_deg=20), 32, 64).mask.sum())
             for fov in range(30, 171, 10)]
    assert areas == sorted(areas)
    assert areas[0] < areas[-1]


def test_projection_mask_matches_pers2pano():
    cam = CameraParams(fov_deg=70, yaw_deg=10, pitch_deg=-30, roll_deg=12)
    mask = projection_mask(cam, 24, 32, 32, 64)
    np.testing.assert_array_equal(mask, pers2pano(np.ones((24, 32)), cam, 32, 64).mask)


def test_rotate_erp_identity_is_bit_exact(sinusoid_erp):
    np.testing.assert_array_equal(rotate_erp(sinusoid_erp, np.eye(3)), sinusoid_erp)


def test_rotate_erp_one_column_yaw_is_bit_exact(sinusoid_erp):
    W = sinusoid_erp.shape[1]
    R = rotation_from_angles(360.0 / W, 0.0, 0.0)
    np.testing.assert_array_equal(rotate_erp(sinusoid_erp, R), np.roll(sinusoid_erp, -1, axis=1))


def test_rotate_erp_composition(sinusoid_erp):
    gen = np.random.default_rng(3)
    diffs = []
    for _ in range(50):
        R1, R2 = (rotation_from_angles(*gen.uniform([-180, -90, -180], [180, 90, 180])) for _ in range(2))
        twice = rotate_erp(rotate_erp(sinusoid_erp, R1), R2)
        once = rotate_erp(sinusoid_erp, R1 @ R2)
        diffs.append(np.mean(np.abs(twice - once)))
    assert np.mean(diffs) < 0.02


def test_rotate_erp_matches_analytic_field(sphere_field):
    H, W = 128, 256
    erp = sphere_field(erp_grid(H, W))
    R = rotation_from_angles(33.0, -21.0, 48.0)
    expected = sphere_field(rotate_vectors(R, erp_grid(H, W)))
    assert np.mean(np.abs(rotate_erp(erp, R) - expected)) < 0.005


def test_cubemap_front_centre_and_constants():
    gen = np.random.default_rng(4)
    erp = gen.uniform(size=(32, 64, 3))
    cube = erp_to_cubemap(erp, 5)
    np.testing.assert_allclose(cube.front[2, 2], erp[15:17, 31:33].mean(axis=(0, 1)), atol=1e-12)
    assert cube.face_size == 5
    flat = erp_to_cubemap(np.full((32, 64, 1), 0.25), 8)
    for face in flat.faces().values():
        np.testing.assert_allclose(face, 0.25, atol=1e-12)


def test_cubemap_up_face_top_points_backward():
    d = erp_grid(64, 128)
    erp = d[..., 2:3].copy()
    up = erp_to_cubemap(erp, 16).up
    # image top toward -Z
    assert up[0].mean() < up[-1].mean()
    down = erp_to_cubemap(erp, 16).down
    assert down[0].mean() > down[-1].mean()


def test_constant_faces_to_erp():
    faces = {name: np.full((6, 6, 1), 0.5) for name in ('front', 'right', 'back', 'left', 'up', 'down')}
    np.testing.assert_allclose(cubemap_to_erp(CubeMap(**faces), 16, 32), 0.5, atol=1e-12)


def test_cubemap_rejects_mismatched_faces():
    faces = {name: np.zeros((6, 6, 1)) for name in ('front', 'right', 'back', 'left', 'up')}
    faces['down'] = np.zeros((4, 4, 1))
    with pytest.raises(InvalidArgumentError):
        cubemap_to_erp(CubeMap(**faces), 16, 32)


def test_erp_cube_erp_round_trip(sinusoid_erp):
    H, W = sinusoid_erp.shape[:2]
    back = cubemap_to_erp(erp_to_cubemap(sinusoid_erp, H), H, W)
    assert np.mean(np.abs(back - sinusoid_erp)) < 0.02
    assert discontinuity_score(back) < 0.5


def test_cube_erp_cube_round_trip(large_sinusoid_erp):
    cube = erp_to_cubemap(large_sinusoid_erp, 64)
    again = erp_to_cubemap(cubemap_to_erp(cube, 256, 512), 64)
    for name, face in cube.faces().items():
        assert np.mean(np.abs(again.faces()[name] - face)) < 0.02, name


def test_horizon_and_cardinal_views(sinusoid_erp):
    views = horizon_views(sinusoid_erp, count=4, size=8)
    assert [cam.yaw_deg for cam, _ in views] == [0.0, 90.0, 180.0, -90.0]
    assert all(img.shape == (8, 8, 3) for _, img in views)
    cards = cardinal_views(sinusoid_erp, size=8)
    assert list(cards) == ['front', 'right', 'back', 'left']
    np.testing.assert_array_equal(cards['right'], views[1][1])


def test_eval_crops_avoid_input_view(sinusoid_erp):
    crops = eval_crops(sinusoid_erp, SplitMix64(5), count=10, size=8)
    assert len(crops) == 10
    for cam, img in crops:
        assert abs(cam.yaw_deg) >= 90.0
        assert cam.pitch_deg == 0.0
        assert img.shape == (8, 8, 3)


def test_sample_conditioning_crop_is_seeded(sinusoid_erp):
    a, cam_a = sample_conditioning_crop(sinusoid_erp, SplitMix64(9), 12, 16)
    b, cam_b = sample_conditioning_crop(sinusoid_erp, SplitMix64(9), 12, 16)
    assert cam_a == cam_b
    assert a.shape == (12, 16, 3)
    np.testing.assert_array_equal(a, b)
