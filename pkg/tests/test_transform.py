import numpy as np
import pytest

from srtlab.grids import Axis, ImageGrid, SinogramGrid
from srtlab.transform import (BallIndicator, GaussianBump, Phantom,
                              SmoothedHalfSpace, backproject, forward,
                              forward_oracle, gaussian_forward_exact)


def _disk_phantom():
    return Phantom(2, [BallIndicator((1.5, 0.0), 0.3, 1.0)])


def test_zero_phantom_gives_zero_sinogram():
    sino = forward(Phantom(2, []), (Axis.spanning(-2, 2, 16),),
                   Axis.spanning(0.05, 4.0, 64))
    assert np.all(sino.values == 0.0)


def test_disk_sinogram_support_window():
    # detector at the origin, disk at distance 1.5 with radius 0.3:
    # circles with t <= 1.2 or t >= 1.8 miss it
    sino = forward(_disk_phantom(), (Axis.spanning(-2, 2, 9),),
                   Axis.spanning(0.01, 2.5, 250))
    row = sino.values[4]          # detector z = 0
    t = sino.t_axis.values()
    assert np.all(row[t <= 1.2] == 0.0)
    assert np.all(row[t >= 1.8] == 0.0)
    assert np.any(row > 0.0)


def test_disk_forward_matches_chord_formula():
    # frozen oracle value: arc length 2 t arccos((d^2+t^2-rho^2)/(2 d t))
    val = forward_oracle(BallIndicator((1.5, 0.0), 0.3), np.array([0.0, 0.0]),
                         np.array(1.5))
    assert val == pytest.approx(3.0 * np.arccos(49.0 / 50.0), rel=1e-14)
    sino = forward(_disk_phantom(), (Axis.spanning(-2, 2, 9),),
                   Axis.spanning(0.05, 2.5, 50))
    t = sino.t_axis.values()
    for iz, z2 in enumerate(sino.det_axes[0].values()):
        want = forward_oracle(_disk_phantom().components[0],
                              np.array([0.0, z2]), t)
        assert np.max(np.abs(sino.values[iz] - want)) <= 1e-8


def test_oracle_containment_cases():
    ball = BallIndicator((1.0, 0.0), 0.5)
    z = np.array([1.0, 0.0])      # detector at the ball center (oracle only)
    assert forward_oracle(ball, z, np.array(0.3)) == pytest.approx(
        2 * np.pi * 0.3)
    assert forward_oracle(ball, z, np.array(0.7)) == 0.0
    far = np.array([0.0, 5.0])
    assert forward_oracle(ball, far, np.array(1.0)) == 0.0


def test_oracle_against_monte_carlo_2d():
    rng = np.random.default_rng(42)
    ball = BallIndicator((1.5, 0.2), 0.3)
    z = np.array([0.0, -0.4])
    t = 1.7
    theta = rng.uniform(0.0, 2.0 * np.pi, 1_000_000)
    pts = z + t * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    hits = np.mean(ball.eval(pts) > 0)
    mc = 2.0 * np.pi * t * hits
    exact = float(forward_oracle(ball, z, np.array(t)))
    sigma = 2.0 * np.pi * t * np.sqrt(hits * (1 - hits) / 1_000_000)
    assert abs(mc - exact) <= 5.0 * sigma + 1e-12


def test_oracle_against_monte_carlo_3d():
    rng = np.random.default_rng(43)
    ball = BallIndicator((1.5, 0.0, 0.1), 0.4)
    z = np.array([0.0, 0.3, -0.2])
    t = 1.8
    v = rng.normal(size=(1_000_000, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    hits = np.mean(ball.eval(z + t * v) > 0)
    mc = 4.0 * np.pi * t * t * hits
    exact = float(forward_oracle(ball, z, np.array(t)))
    sigma = 4.0 * np.pi * t * t * np.sqrt(hits * (1 - hits) / 1_000_000)
    assert abs(mc - exact) <= 5.0 * sigma + 1e-12


@pytest.mark.parametrize("dim", [2, 3])
def test_gaussian_forward_matches_closed_form(dim):
    center = (1.4, 0.2) if dim == 2 else (1.4, 0.2, -0.1)
    comp = GaussianBump(center, 0.15, 0.8)
    ph = Phantom(dim, [comp])
    det_axes = (Axis.spanning(-1.5, 1.5, 7),) if dim == 2 else (
        Axis.spanning(-1.0, 1.0, 5), Axis.spanning(-1.0, 1.0, 5))
    t_ax = Axis.spanning(0.02, 4.0, 160)
    sino = forward(ph, det_axes, t_ax)
    t = t_ax.values()
    dets = sino.detector_points().reshape(-1, dim - 1)
    flat = sino.values.reshape(-1, t_ax.count)
    for i, zdet in enumerate(dets):
        z = np.concatenate([[0.0], zdet])
        want = gaussian_forward_exact(comp, z, t)
        scale = 1e-8 * np.maximum(t * comp.amplitude, 1e-12)
        assert np.all(np.abs(flat[i] - want) <= 10.0 * scale)


def test_forward_is_exactly_linear_in_components():
    g1 = GaussianBump((1.4, 0.1), 0.12, 1.0)
    g2 = BallIndicator((1.8, -0.3), 0.25, -0.7)
    det = (Axis.spanning(-1, 1, 6),)
    t_ax = Axis.spanning(0.02, 4.0, 100)
    both = forward(Phantom(2, [g1, g2]), det, t_ax)
    one = forward(Phantom(2, [g1]), det, t_ax)
    two = forward(Phantom(2, [g2]), det, t_ax)
    assert np.max(np.abs(both.values - one.values - two.values)) <= 1e-14


def test_forward_translation_invariance_along_detector_axis():
    shift = 0.35
    comp = GaussianBump((1.3, 0.2), 0.15, 1.0)
    moved = GaussianBump((1.3, 0.2 + shift), 0.15, 1.0)
    t_ax = Axis.spanning(0.02, 4.0, 120)
    base = forward(Phantom(2, [comp]), (Axis.spanning(-1.0, 1.0, 11),), t_ax)
    trans = forward(Phantom(2, [moved]),
                    (Axis.spanning(-1.0 + shift, 1.0 + shift, 11),), t_ax)
    assert np.max(np.abs(base.values - trans.values)) <= 1e-10


def test_support_invariant_enforced():
    with pytest.raises(ValueError):
        Phantom(2, [BallIndicator((0.2, 0.0), 0.3)])
    with pytest.raises(ValueError):
        Phantom(2, [GaussianBump((0.5, 0.0), 0.2)])   # effective tail crosses


def test_smoothed_half_space_is_windowed():
    comp = SmoothedHalfSpace(offset=1.5, normal=(1.0, 0.0), width=0.05,
                             amplitude=2.0, window_center=(1.5, 0.0),
                             window_sigma=0.1)
    ph = Phantom(2, [comp])
    pts = np.array([[1.6, 0.0], [1.4, 0.0], [1.5, 3.0]])
    vals = ph.eval(pts)
    assert vals[0] > 1.0                       # above the edge, in window
    assert vals[1] < 0.1                       # below the edge
    assert vals[2] == pytest.approx(0.0, abs=1e-12)   # window kills far field


def test_radius_grid_must_cover_support():
    with pytest.raises(ValueError):
        forward(_disk_phantom(), (Axis.spanning(-2, 2, 5),),
                Axis.spanning(0.05, 1.9, 30))


def _bump_sinogram():
    det = Axis.spanning(-1.0, 1.0, 41)
    t_ax = Axis.spanning(0.02, 3.0, 150)
    sino = SinogramGrid(2, (det,), t_ax, np.zeros((41, 150)))
    t = t_ax.values()
    z0, t0 = 0.0, 1.2
    for iz, z in enumerate(det.values()):
        sino.values[iz] = np.exp(-0.5 * ((z - z0) / 0.15) ** 2) \
            * np.exp(-0.5 * ((t - t0) / 0.05) ** 2)
    return sino, z0, t0


def test_backproject_zero_and_linearity():
    sino, _, _ = _bump_sinogram()
    geom = ImageGrid.blank(2, (0.6, -0.6), (1.8, 0.6), (25, 25))
    zero = backproject(sino.copy(values=np.zeros_like(sino.values)), geom)
    assert np.all(zero.values == 0.0)
    rng = np.random.default_rng(9)
    g1 = sino.copy(values=rng.normal(size=sino.values.shape))
    g2 = sino.copy(values=rng.normal(size=sino.values.shape))
    both = backproject(g1.copy(values=g1.values + g2.values), geom)
    sep = backproject(g1, geom).values + backproject(g2, geom).values
    assert np.max(np.abs(both.values - sep)) <= 1e-12 * np.max(np.abs(sep))


def test_backproject_concentrates_on_circle_and_matches_direct_sum():
    from scipy.interpolate import interp1d
    sino, z0, t0 = _bump_sinogram()
    geom = ImageGrid.blank(2, (0.6, -0.6), (1.8, 0.6), (49, 49))
    img = backproject(sino, geom)

    # independent direct-summation oracle at probe points (cubic spline
    # interpolation, plain python accumulation)
    zs = sino.det_axes[0].values()
    w = sino.det_axes[0].trapezoid_weights()
    t = sino.t_axis.values()
    probes = [(1.2, 0.0), (0.85, 0.85), (0.7, -0.3), (1.5, 0.4), (1.0, 0.1)]
    for px, py in probes:
        acc = 0.0
        for iz in range(zs.size):
            spl = interp1d(t, sino.values[iz], kind="cubic")
            acc += w[iz] * float(spl(np.hypot(px, py - zs[iz])))
        got = img.sample(np.array([[px, py]]))[0]
        assert got == pytest.approx(acc, abs=2e-4 * max(1.0, abs(acc)))

    # concentration near the circle |x - (0, z0)| = t0
    on = img.sample(np.array([[t0, z0]]))[0]
    off = img.sample(np.array([[0.7, 0.45]]))[0]
    assert abs(on) > 10.0 * abs(off)


def test_backproject_rejects_out_of_range_radii():
    sino, _, _ = _bump_sinogram()
    geom = ImageGrid.blank(2, (2.5, -0.5), (3.5, 0.5), (11, 11))
    with pytest.raises(ValueError):
        backproject(sino, geom)


@pytest.mark.parametrize("dim", [2, 3])
def test_duality_of_forward_and_backprojection(dim):
    # <R f, g> over the data measure equals <f, R* g> over the image measure
    rng = np.random.default_rng(17)
    if dim == 2:
        ph = Phantom(2, [GaussianBump((1.2, 0.1), 0.15, 1.0)])
        det_axes = (Axis.spanning(-3.0, 3.0, 121),)
        t_ax = Axis.spanning(0.02, 5.0, 400)
        geom = ImageGrid.blank(2, (0.55, -0.6), (1.85, 0.7), (131, 131))
    else:
        ph = Phantom(3, [GaussianBump((1.2, 0.0, 0.1), 0.15, 1.0)])
        det_axes = (Axis.spanning(-2.0, 2.0, 41), Axis.spanning(-2.0, 2.0, 41))
        t_ax = Axis.spanning(0.02, 5.0, 300)
        geom = ImageGrid.blank(3, (0.55, -0.6, -0.5), (1.85, 0.7, 0.8),
                               (66, 66, 66))
    sino = forward(ph, det_axes, t_ax)

    # smooth synthetic dual field g(z, t)
    t = t_ax.values()
    if dim == 2:
        zs = sino.detector_points()
        g = (np.exp(-0.5 * (zs[:, None] / 0.8) ** 2)
             * np.exp(-0.5 * ((t[None, :] - 1.4) / 0.25) ** 2))
    else:
        zz = sino.detector_points()
        g = (np.exp(-0.5 * ((zz[..., 0] ** 2 + zz[..., 1] ** 2)[..., None]
                            / 0.8 ** 2))
             * np.exp(-0.5 * ((t[None, None, :] - 1.4) / 0.25) ** 2))
    gsino = sino.copy(values=g)

    w_parts = [ax.trapezoid_weights() for ax in sino.axes]
    wg = w_parts[0]
    for wp in w_parts[1:]:
        wg = np.multiply.outer(wg, wp)
    lhs = np.sum(sino.values * g * wg)

    bp = backproject(gsino, geom)
    fvals = ph.eval(geom.points())
    wi = geom.spacing ** dim
    rhs = np.sum(bp.values * fvals) * wi
    assert lhs == pytest.approx(rhs, rel=1e-4)
