import numpy as np
import pytest
import sympy

from srtlab.cutoff import CutoffProfile, CutoffSpec, eval_cutoff


def test_box_profile_is_one_inside_zero_outside():
    box = CutoffProfile.polynomial(0)
    assert eval_cutoff(box, 0.5) == 1.0
    assert eval_cutoff(box, -1.0) == 1.0
    assert eval_cutoff(box, 1.7) == 0.0
    assert eval_cutoff(box, -3.0, 2) == 0.0


def test_polynomial_k1_derivative_at_endpoint():
    prof = CutoffProfile.polynomial(1)          # 1 - tau^2
    assert eval_cutoff(prof, 1.0, 1) == pytest.approx(-2.0, abs=1e-12)
    assert eval_cutoff(prof, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_polynomial_k2_second_derivative_symbolic_oracle():
    # independent route: differentiate the closed form symbolically
    tau = sympy.symbols("tau")
    expr = (1 - tau ** 2) ** 2
    expected = float(sympy.diff(expr, tau, 2).subs(tau, 1))
    assert expected == 8.0
    prof = CutoffProfile.polynomial(2)
    assert eval_cutoff(prof, 1.0, 2) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("family", ["polynomial", "plateau"])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_exact_vanishing_order_at_endpoints(family, k):
    if family == "polynomial":
        prof = CutoffProfile.polynomial(k)
    else:
        prof = CutoffProfile.plateau(k, 0.5)
    for endpoint in prof.interval:
        for l in range(k):
            scale = max(abs(eval_cutoff(prof, endpoint, k)), 1.0)
            assert abs(eval_cutoff(prof, endpoint, l)) <= 1e-9 * scale
        assert abs(eval_cutoff(prof, endpoint, k)) >= 1e-3


@pytest.mark.parametrize("k", [1, 2, 3])
def test_smoothness_across_boundary(k):
    # h in C^(k-1): derivatives below order k match the zero extension
    prof = CutoffProfile.polynomial(k)
    delta = 1e-3
    scale = abs(eval_cutoff(prof, prof.interval[0], k))
    for l in range(k):
        inner = eval_cutoff(prof, prof.interval[0] + delta, l)
        outer = eval_cutoff(prof, prof.interval[0] - delta, l)
        assert outer == 0.0
        assert abs(inner - outer) <= 10.0 * scale * delta ** (k - l)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_one_sided_split_sums_to_base(k):
    base = CutoffProfile.polynomial(k)
    hi = CutoffProfile.one_sided("+", k)
    lo = CutoffProfile.one_sided("-", k)
    tau = np.linspace(-1.2, 1.2, 1001)
    total = hi.eval(tau) + lo.eval(tau)
    assert np.max(np.abs(total - base.eval(tau))) <= 1e-14


def test_one_sided_vanishes_identically_near_dead_endpoint():
    hi = CutoffProfile.one_sided("+", 2)       # lives near the upper endpoint
    tau = np.linspace(-1.0, -0.7, 100)
    assert np.all(hi.eval(tau) == 0.0)
    assert hi.vanishes_identically_near(-1.0, 0.2)
    assert not hi.vanishes_identically_near(1.0, 0.2)
    lo = CutoffProfile.one_sided("-", 2)
    assert lo.vanishes_identically_near(1.0, 0.2)
    # dead endpoint: all derivatives vanish there
    for l in range(6):
        assert hi.eval(-1.0, l) == 0.0


def test_plateau_is_one_on_the_middle():
    prof = CutoffProfile.plateau(2, 0.5)
    tau = np.linspace(-0.45, 0.45, 50)
    assert np.max(np.abs(prof.eval(tau) - 1.0)) <= 2e-15


def test_plateau_validates_fraction():
    with pytest.raises(ValueError):
        CutoffProfile.plateau(1, 0.0)
    with pytest.raises(ValueError):
        CutoffProfile.plateau(1, 1.0)


def test_negative_derivative_order_rejected():
    prof = CutoffProfile.polynomial(1)
    with pytest.raises(ValueError):
        eval_cutoff(prof, 0.0, -1)


def test_per_endpoint_orders():
    prof = CutoffProfile.polynomial(1, k_hi=3)
    assert eval_cutoff(prof, -1.0, 1) != 0.0
    for l in range(3):
        assert eval_cutoff(prof, 1.0, l) == pytest.approx(0.0, abs=1e-13)
    assert eval_cutoff(prof, 1.0, 3) != 0.0


def test_plane_cutoff_2d_and_3d():
    spec2 = CutoffSpec.for_segment(CutoffProfile.polynomial(1))
    assert spec2.eval(np.array([0.0, 0.5])) == pytest.approx(0.75)
    spec3 = CutoffSpec.for_rectangle(CutoffProfile.polynomial(1),
                                     CutoffProfile.polynomial(1))
    assert spec3.eval(np.array([0.0, 0.0, 0.0])) == pytest.approx(1.0)
    assert spec3.eval(np.array([0.0, 1.0, 0.0])) == pytest.approx(0.0)
    assert spec3.eval(np.array([0.0, 3.0, 0.2])) == 0.0
    with pytest.raises(ValueError):
        spec2.eval(np.array([0.3, 0.5]))        # off the detector plane


def test_3d_cutoff_is_exact_product():
    p2 = CutoffProfile.plateau(2, 0.4, (-1.5, 1.5))
    p3 = CutoffProfile.polynomial(1, (-0.8, 0.8))
    spec = CutoffSpec.for_rectangle(p2, p3)
    rng = np.random.default_rng(0)
    z2 = rng.uniform(-2, 2, 200)
    z3 = rng.uniform(-1, 1, 200)
    z = np.stack([np.zeros(200), z2, z3], axis=-1)
    assert np.array_equal(spec.eval(z), p2.eval(z2) * p3.eval(z3))
