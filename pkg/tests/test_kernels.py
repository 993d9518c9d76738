import numpy as np
import pytest

from srtlab import kernels
from srtlab.kernels import interp_uniform, pykernels


def test_interp_uniform_exact_on_cubics():
    xs = np.linspace(0.0, 3.0, 31)
    vals = 2.0 + xs - 0.5 * xs ** 2 + 0.125 * xs ** 3
    xq = np.array([0.0, 0.017, 1.234, 2.5, 2.97, 3.0])
    got = interp_uniform(vals, 0.0, 0.1, xq)
    want = 2.0 + xq - 0.5 * xq ** 2 + 0.125 * xq ** 3
    assert np.allclose(got, want, atol=1e-12)


def test_interp_uniform_oob_modes():
    vals = np.ones(8)
    assert interp_uniform(vals, 0.0, 1.0, np.array([-0.5, 7.5])).tolist() == [0.0, 0.0]
    with pytest.raises(ValueError):
        interp_uniform(vals, 0.0, 1.0, np.array([7.5]), oob="error")


def test_interp_uniform_batched_rows():
    xs = np.linspace(0, 1, 16)
    rows = np.stack([xs ** 2, 1.0 - xs])
    xq = np.array([0.25, 0.5])
    got = interp_uniform(rows, 0.0, xs[1], xq)
    assert np.allclose(got, [[0.0625, 0.25], [0.75, 0.5]], atol=1e-12)


def _random_2d_problem(rng):
    nz, nt = 12, 64
    values = rng.normal(size=(nz, nt))
    z = np.linspace(-1.0, 1.0, nz)
    wz = np.full(nz, 2.0 / (nz - 1))
    wz[0] *= 0.5
    wz[-1] *= 0.5
    x1 = np.linspace(0.8, 1.6, 9)
    x2 = np.linspace(-0.5, 0.5, 7)
    return values, 0.05, 0.05, z, wz, x1, x2


def test_backends_agree_2d():
    rng = np.random.default_rng(1)
    args = _random_2d_problem(rng)
    ref = pykernels.backproject_2d(*args)
    got = kernels.backproject_2d(*args)
    assert np.max(np.abs(ref - got)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_backends_agree_3d():
    rng = np.random.default_rng(2)
    nz2, nz3, nt = 6, 5, 64
    values = rng.normal(size=(nz2, nz3, nt))
    z2 = np.linspace(-1, 1, nz2)
    z3 = np.linspace(-1, 1, nz3)
    w2 = np.full(nz2, 2.0 / (nz2 - 1)); w2[0] *= 0.5; w2[-1] *= 0.5
    w3 = np.full(nz3, 2.0 / (nz3 - 1)); w3[0] *= 0.5; w3[-1] *= 0.5
    x1 = np.linspace(0.8, 1.4, 5)
    x2 = np.linspace(-0.3, 0.3, 4)
    x3 = np.linspace(-0.2, 0.2, 3)
    args = (values, 0.05, 0.05, z2, z3, w2, w3, x1, x2, x3)
    ref = pykernels.backproject_3d(*args)
    got = kernels.backproject_3d(*args)
    assert np.max(np.abs(ref - got)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_backproject_out_of_range_raises():
    rng = np.random.default_rng(3)
    values, t0, dt, z, wz, x1, x2 = _random_2d_problem(rng)
    x1_far = np.linspace(4.0, 5.0, 4)       # beyond t0 + nt*dt = 3.25
    with pytest.raises(ValueError):
        pykernels.backproject_2d(values, t0, dt, z, wz, x1_far, x2)
    if kernels.HAVE_EXTENSION:
        with pytest.raises(ValueError):
            kernels.backproject_2d(values, t0, dt, z, wz, x1_far, x2)


def test_threading_does_not_change_results():
    if not kernels.HAVE_EXTENSION:
        pytest.skip("compiled extension not available")
    rng = np.random.default_rng(4)
    args = _random_2d_problem(rng)
    one = kernels.backproject_2d(*args, nthreads=1)
    four = kernels.backproject_2d(*args, nthreads=4)
    assert np.array_equal(one, four)
