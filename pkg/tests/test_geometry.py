import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourier_pole.errors import DegenerateGeometryError
from fourier_pole.geometry import (CameraFrame, CameraView, OrthographicIntrinsics,
                                   PinholeIntrinsics, SphericalPosition, camera_matrix,
                                   hover_frame, look_at_frame, project_point,
                                   spherical_to_cartesian, true_pole_projection_angle)


def test_spherical_zero_angles():
    assert np.allclose(spherical_to_cartesian(SphericalPosition(1, 0, 0)), [1, 0, 0], atol=1e-12)


def test_spherical_pole():
    p = spherical_to_cartesian(SphericalPosition(2, np.pi / 2, 1.3))
    assert np.allclose(p, [0, 0, 2], atol=1e-12)


def test_spherical_reference_values():
    # 30-digit reference evaluation of cos(14 deg)cos(30 deg), cos(14 deg)sin(30 deg), sin(14 deg)
    ref = [0.840300748138485, 0.485147863137998, 0.241921895599668]
    p = spherical_to_cartesian(SphericalPosition(1, np.radians(14), np.radians(30)))
    assert np.allclose(p, ref, atol=1e-5)


def test_spherical_position_rejects_bad_ranges():
    with pytest.raises(ValueError):
        SphericalPosition(0.0, 0, 0)
    with pytest.raises(ValueError):
        SphericalPosition(1.0, 2.0, 0)
    assert SphericalPosition(1.0, 0.0, -0.5).lon == pytest.approx(2 * np.pi - 0.5)


def test_frame_rejects_left_handed():
    with pytest.raises(DegenerateGeometryError):
        CameraFrame([1, 0, 0], [0, 1, 0], [0, 0, -1])
    with pytest.raises(DegenerateGeometryError):
        CameraFrame([1, 0, 0], [1, 0, 0], [0, 0, 1])


def test_look_at_axis_aligned():
    f = look_at_frame([0, -1, 0], [0, 0, 0], [0, 0, 1])
    assert np.allclose(f.k, [0, 1, 0], atol=1e-12)
    assert np.allclose(f.matrix.T @ f.matrix, np.eye(3), atol=1e-12)
    assert np.allclose(np.cross(f.i, f.j), f.k, atol=1e-12)
    # up hint appears pointing up the image, i.e. along -j
    assert np.allclose(f.j, [0, 0, -1], atol=1e-12)


def test_look_at_parallel_hint_raises():
    with pytest.raises(DegenerateGeometryError):
        look_at_frame([1, 0, 0], [0, 0, 0], [1, 0, 0])


def test_look_at_boresight_is_normalized_offset():
    pos = SphericalPosition(10, np.radians(14), 0.0)
    f = look_at_frame(spherical_to_cartesian(pos), np.zeros(3), [0, 0, 1])
    expect = -spherical_to_cartesian(SphericalPosition(1, np.radians(14), 0.0))
    assert np.allclose(f.k, expect, atol=1e-9)


def test_look_at_random_frames_are_orthonormal(rng):
    for _ in range(1000):
        cam = rng.normal(size=3) * 5
        target = rng.normal(size=3)
        up = rng.normal(size=3)
        try:
            f = look_at_frame(cam, target, up)
        except DegenerateGeometryError:
            continue
        m = f.matrix
        assert np.allclose(m.T @ m, np.eye(3), atol=1e-9)
        assert np.allclose(np.cross(f.i, f.j), f.k, atol=1e-9)


def _view(intr, lat=0.3, lon=1.1, roll=0.4):
    pos = SphericalPosition(10.0, lat, lon)
    return CameraView(pos, hover_frame(pos, roll), intr, 256)


@pytest.mark.parametrize("intr", [OrthographicIntrinsics(20.0, 128, 100),
                                  PinholeIntrinsics(1000.0, 1000.0, 128, 100)])
def test_origin_projects_to_principal_point(intr):
    c = camera_matrix(_view(intr))
    assert np.allclose(project_point(c, np.zeros(3)), [128, 100], atol=1e-9)


def test_orthographic_axis_displacement():
    v = _view(OrthographicIntrinsics(20.0, 128, 128))
    c = camera_matrix(v)
    assert np.allclose(project_point(c, 0.7 * v.frame.i), [128 + 20 * 0.7, 128], atol=1e-9)


def test_pinhole_similar_triangles():
    # f = 1000 px at range 10: one unit off-axis lands 100 px from the principal point
    v = _view(PinholeIntrinsics(1000.0, 1000.0, 128, 128))
    c = camera_matrix(v)
    uv = project_point(c, v.frame.i)
    assert abs(np.hypot(uv[0] - 128, uv[1] - 128) - 100.0) < 0.5


def test_pinhole_rejects_point_behind_camera():
    v = _view(PinholeIntrinsics(1000.0, 1000.0, 128, 128))
    with pytest.raises(DegenerateGeometryError):
        project_point(camera_matrix(v), 2 * v.r_body)


def test_translation_consistency(rng):
    """Moving camera and point together leaves the pixel unchanged."""
    for intr in (OrthographicIntrinsics(20.0, 128, 128), PinholeIntrinsics(800.0, 800.0, 128, 128)):
        v = _view(intr)
        c = camera_matrix(v)
        for _ in range(20):
            p = rng.normal(size=3)
            t = rng.normal(size=3)
            # a camera translated by t sees p + t where it saw p
            m = v.frame.matrix.T
            r = v.r_body + t
            if isinstance(intr, PinholeIntrinsics):
                c2 = intr.K @ np.hstack([m, (-m @ r)[:, None]])
            else:
                c2 = c.copy()
                c2[:2, 3] -= intr.scale * (m[:2] @ t)
            assert np.allclose(project_point(c2, p + t), project_point(c, p), atol=1e-9)


def test_pole_angle_anchors():
    f = hover_frame(SphericalPosition(10, 0.2, 0.7))
    assert true_pole_projection_angle(-f.j, f) == pytest.approx(0.0, abs=1e-12)
    assert true_pole_projection_angle(f.i, f) == pytest.approx(np.pi / 2, abs=1e-12)
    with pytest.raises(DegenerateGeometryError):
        true_pole_projection_angle(f.k, f)


def test_hover_frame_places_pole_at_requested_angle():
    for roll in np.radians([0, 20, 95, 200, 359]):
        f = hover_frame(SphericalPosition(10, np.radians(14), 1.0), roll)
        assert true_pole_projection_angle([0, 0, 1], f) == pytest.approx(roll, abs=1e-9)


def test_rolled_frame_shifts_angle(rng):
    f = hover_frame(SphericalPosition(10, 0.3, 2.0))
    w = rng.normal(size=3)
    a0 = true_pole_projection_angle(w, f)
    a1 = true_pole_projection_angle(w, f.rolled(0.5))
    assert np.mod(a1 - a0, 2 * np.pi) == pytest.approx(0.5, abs=1e-9)


unit_vectors = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1)


@settings(max_examples=200, deadline=None)
@given(unit_vectors, st.floats(-1.4, 1.4), st.floats(0, 6.28), st.floats(0, 6.28))
def test_pole_angle_properties(w, lat, lon, roll):
    w = np.asarray(w) / np.linalg.norm(w)
    f = hover_frame(SphericalPosition(5, lat, lon), roll)
    wi, wj = w @ f.i, w @ f.j
    if np.hypot(wi, wj) < 1e-6:
        return
    a = true_pole_projection_angle(w, f)
    b = true_pole_projection_angle(-w, f)
    d = np.mod(b - a, 2 * np.pi)
    assert abs(d - np.pi) < 1e-9
    assert np.allclose([np.sin(a), -np.cos(a)], np.array([wi, wj]) / np.hypot(wi, wj), atol=1e-9)
