import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from oracles import naive_dft2, pearson_by_hand, rot90_about_center

from fourier_pole.config import PipelineConfig
from fourier_pole.errors import DegenerateImageError
from fourier_pole.pipeline import accumulate_stack, render_frames
from fourier_pole.spectral import (amplitude_spectrum, angle_from_rotation, correlation_coefficient,
                                   dft2, disambiguate, estimate_in_plane_angle,
                                   expand_pole_hypotheses, log_compress, low_pass_crop,
                                   query_grid, reflect_vertical, rotate_image_nn, symmetry_score)
from fourier_pole.stack import StackImage, circular_shift

images = arrays(np.float64, st.sampled_from([(8, 8), (9, 9), (16, 16)]),
                elements=st.floats(0, 10, allow_nan=False, allow_subnormal=False))


@pytest.mark.parametrize("n", [4, 8, 16])
def test_dft_matches_naive_oracle(rng, n):
    for _ in range(7 if n < 16 else 6):
        img = rng.random((n, n))
        assert np.allclose(dft2(img), naive_dft2(img), atol=1e-9, rtol=0)


def test_dft_trivial_spectra():
    a = amplitude_spectrum(np.full((8, 8), 3.0))
    assert a[4, 4] == pytest.approx(3.0 * 64)
    a[4, 4] = 0
    assert np.allclose(a, 0, atol=1e-9)
    imp = np.zeros((8, 8))
    imp[2, 5] = 1.0
    assert np.allclose(amplitude_spectrum(imp), 1.0, atol=1e-9)


def test_dft_linearity(rng):
    a, b = rng.random((2, 16, 16))
    assert np.allclose(dft2(2.5 * a - 0.7 * b), 2.5 * dft2(a) - 0.7 * dft2(b), atol=1e-9)


def test_parseval(rng):
    img = rng.random((32, 32))
    assert np.sum(amplitude_spectrum(img) ** 2) == pytest.approx(32 * 32 * np.sum(img ** 2), rel=1e-6)


def test_shift_theorem_on_random_pairs(rng):
    for _ in range(100):
        n = int(rng.choice([8, 15, 16, 32]))
        img = rng.random((n, n))
        tu, tv = rng.integers(-n, n, 2)
        a = amplitude_spectrum(img)
        b = amplitude_spectrum(circular_shift(img, tu, tv))
        assert np.allclose(b, a, rtol=1e-9, atol=1e-9 * a.max())


def test_central_symmetry(rng):
    for n in (8, 9, 16, 17):
        a = amplitude_spectrum(rng.random((n, n)))
        c = n // 2
        for x in range(n):
            for y in range(n):
                mx, my = 2 * c - x, 2 * c - y
                if 0 <= mx < n and 0 <= my < n:
                    assert abs(a[x, y] - a[mx, my]) <= 1e-9 * max(1.0, a[x, y])


def test_low_pass_enumeration():
    amp = np.ones((8, 8))
    for tau in (1.01, 1.5, 2.3):
        kept = {tuple(int(x) for x in p) for p in np.argwhere(low_pass_crop(amp, tau) > 0)}
        expect = {(m, k) for m in range(8) for k in range(8)
                  if ((m - 4) ** 2 + (k - 4) ** 2) ** 0.5 < tau}
        assert kept == expect
    # center plus 4 edge neighbors, then the diagonals at sqrt(2) join
    assert (low_pass_crop(amp, 1.01) > 0).sum() == 5
    assert (low_pass_crop(amp, 1.5) > 0).sum() == 9
    assert not low_pass_crop(amp, 0).any()
    assert np.array_equal(low_pass_crop(amp, 8), amp)
    assert np.array_equal(low_pass_crop(amp, "full"), amp)


def test_log_compress_values(rng):
    assert log_compress(np.array([0.0]))[0] == 0.0
    assert log_compress(np.array([np.sqrt(np.e - 1)]))[0] == pytest.approx(1.0, abs=1e-12)
    a = rng.random(1000) * 50
    b = a + rng.random(1000) + 1e-6
    assert (log_compress(a) < log_compress(b)).all()


@pytest.mark.parametrize("n", [5, 9, 17, 33])
def test_rotate_quarter_turn_is_exact_permutation(rng, n):
    img = rng.integers(0, 100, (n, n))
    out = rotate_image_nn(img, np.pi / 2)
    assert np.array_equal(out, rot90_about_center(img))
    assert np.array_equal(out, np.rot90(img, -1))


def test_rotate_identity_angles(rng):
    img = rng.random((16, 16))
    assert np.array_equal(rotate_image_nn(img, 0.0), img)
    assert np.array_equal(rotate_image_nn(img, 2 * np.pi), img)


def test_rotate_half_pixel_goes_to_upper_index():
    # a source coordinate exactly between two pixels maps to the higher index
    img = np.arange(81).reshape(9, 9)
    out = rotate_image_nn(img, np.pi / 3)
    assert out[4, 4] == img[4, 4]


def test_reflect_vertical_definition():
    img = np.zeros((8, 8), int)
    img[3, 1] = 1  # column 2 in 1-based indexing
    out = reflect_vertical(img)
    assert out[3, 6] == 1 and out.sum() == 1  # column 7 in 1-based indexing
    r = np.random.default_rng(0).random((7, 7))
    assert np.array_equal(reflect_vertical(reflect_vertical(r)), r)
    sym = r + reflect_vertical(r)
    assert np.array_equal(reflect_vertical(sym), sym)


def test_correlation_hand_cases(rng):
    a = np.array([[0, 1], [2, 3]])
    b = np.array([[3, 2], [1, 0]])
    assert correlation_coefficient(a, b) == pytest.approx(-1.0, abs=1e-12)
    r = rng.random((6, 6))
    assert correlation_coefficient(r, r) == pytest.approx(1.0, abs=1e-12)
    assert correlation_coefficient(r, -r) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(DegenerateImageError):
        correlation_coefficient(np.ones((4, 4)), r[:4, :4])


def test_symmetry_score_hand_case():
    img = np.array([[1, 0, 2], [0, 3, 0], [4, 0, 0]])
    expect = pearson_by_hand(img, img[:, ::-1])
    assert symmetry_score(img) == pytest.approx(expect, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(images, st.floats(0.01, 100))
def test_symmetry_score_properties(img, c):
    if np.ptp(img) < 1e-6:
        return
    assert abs(symmetry_score(img)) <= 1 + 1e-9
    assert symmetry_score(c * img) == pytest.approx(symmetry_score(img), abs=1e-9)
    sym = img + reflect_vertical(img)
    if np.ptp(sym) > 1e-6:
        assert symmetry_score(sym) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(images, st.integers(-20, 20), st.integers(-20, 20))
def test_shift_theorem_property(img, tu, tv):
    a = amplitude_spectrum(img)
    assert np.allclose(amplitude_spectrum(circular_shift(img, tu, tv)), a,
                       rtol=1e-9, atol=1e-9 * max(1.0, a.max()))


def test_query_grid():
    g = query_grid()
    assert len(g) == 90 and g[0] == 0.0
    assert np.all(np.diff(g) > 0) and g[-1] < np.pi / 2
    assert len(query_grid(np.radians(10))) == 9


def test_angle_from_rotation():
    assert angle_from_rotation(0.0) == 0.0
    assert np.degrees(angle_from_rotation(np.radians(70))) == pytest.approx(20.0)
    assert np.degrees(angle_from_rotation(np.radians(10))) == pytest.approx(80.0)


def ellipse_frames(n, alpha, count=12, seed=0):
    """Filled ellipses mirror-symmetric about the axis at in-plane angle ``alpha``."""
    rng = np.random.default_rng(seed)
    d = np.array([np.sin(alpha), -np.cos(alpha)])  # (u, v) direction of the axis
    e = np.array([-d[1], d[0]])
    m, k = np.indices((n, n))
    uv = np.stack([k - n // 2, m - n // 2], -1).astype(float)
    frames = []
    for _ in range(count):
        a, b = rng.uniform(0.15, 0.35, 2) * n
        off = rng.uniform(-0.05, 0.05) * n
        p = uv - off * d
        frames.append((p @ d / a) ** 2 + (p @ e / b) ** 2 <= 1.0)
    return frames


@pytest.mark.parametrize("alpha_deg", [20.0, 5.0, 63.0])
def test_ellipse_stack_recovers_axis(alpha_deg):
    frames = ellipse_frames(128, np.radians(alpha_deg))
    # inscribed disc: whole spectrum without the square's corners, which favor 45 deg
    alpha_hat, curve = estimate_in_plane_angle(frames, tau=63.0)
    err = abs((np.degrees(alpha_hat) - alpha_deg + 45) % 90 - 45)
    assert err <= 1.0
    assert len(curve.thetas) == 90


def test_estimate_tie_breaks_to_smallest_angle():
    img = np.zeros((33, 33), int)
    img[8:25, 8:25] = 1  # square: symmetric at 0 and 45 degrees
    _, curve = estimate_in_plane_angle(StackImage(img, 1), tau=None)
    assert curve.argmax() == 0


def test_estimate_rejects_constant_stack():
    with pytest.raises(DegenerateImageError):
        estimate_in_plane_angle(StackImage(np.zeros((16, 16), int), 2), tau=None)
    with pytest.raises(ValueError):
        estimate_in_plane_angle([np.ones((16, 16), bool)])


def test_hypotheses_and_disambiguation():
    h = np.degrees(expand_pole_hypotheses(np.radians(20)))
    assert np.allclose(h, [20, 110, 200, 290])
    assert np.allclose(np.degrees(expand_pole_hypotheses(0.0)), [0, 90, 180, 270])
    assert np.allclose(np.diff(np.degrees(expand_pole_hypotheses(1.3))) % 360, 90)
    hyp = np.radians([20, 110, 200, 290])
    assert np.degrees(disambiguate(hyp, np.radians(95))) == pytest.approx(110)
    assert np.degrees(disambiguate(hyp, np.radians(65))) == pytest.approx(20)
    assert np.degrees(disambiguate(hyp, np.radians(20))) == pytest.approx(20)
    with pytest.raises(ValueError):
        disambiguate(hyp, np.nan)


def test_space_domain_stack_is_symmetric_about_pole():
    """Convex body, zero phase, known centers: the stack mirrors about the pole axis."""
    cfg = PipelineConfig()
    cfg.shape.kind = "diamond"
    cfg.shape.subdivisions = 2
    cfg.camera.resolution = 128
    cfg.sun.phase_deg = 0.0
    stack = accumulate_stack(render_frames(cfg), "known_center")
    aligned = rotate_image_nn(stack.pixels.astype(float), -np.radians(cfg.camera.pole_angle_deg))
    assert symmetry_score(aligned) > 0.95


@pytest.mark.parametrize("n", [9, 17, 33])
def test_symmetric_image_has_symmetric_spectrum(rng, n):
    # odd N only: for even N the centered spectrum mirrors about a column half a pixel off
    half = rng.random((n, n))
    img = half + reflect_vertical(half)
    a = amplitude_spectrum(img)
    assert symmetry_score(a) == pytest.approx(1.0, abs=1e-6)
    e = log_compress(a)
    assert symmetry_score(rotate_image_nn(e, np.pi / 2)) == pytest.approx(symmetry_score(e), abs=1e-3)


def test_identical_disc_frames_tie_to_zero():
    m, k = np.indices((65, 65))
    d = (k - 32) ** 2 + (m - 32) ** 2 <= 15 ** 2
    alpha_hat, curve = estimate_in_plane_angle([d, d], tau=None)
    assert curve.argmax() == 0
