import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antiwick.acceptance import ainfty_sample
from antiwick.errors import DomainError, NumericError, ValidationError
from antiwick.symbols import (BallSpec, abs_power, ainfty_constant, ainfty_sweep, ball_average,
                              ball_integral, check_hermitian_table, constant, doubling_ratios,
                              eval_symbol, generic, growth_check, parse_symbol, polynomial, radial,
                              shifted, summed, unit_ball_nodes)

coord = st.floats(-5, 5, allow_nan=False)


def mc_average(fn, center, r, rng, n=400_000):
    """Monte Carlo mean over the disc B(center, r) in R^2."""
    u = rng.uniform(-1, 1, size=(n, 2))
    u = u[np.sum(u * u, axis=1) < 1]
    pts = np.asarray(center) + r * u
    return float(np.mean(fn(pts[:, 0], pts[:, 1])))


# evaluation ---------------------------------------------------------------

def test_constant_value():
    assert eval_symbol(constant(3), 0.7, -2.0) == 3


def test_polynomial_modulus_squared(z2):
    assert eval_symbol(z2, 1.0, 2.0) == pytest.approx(5.0, rel=1e-14)


def test_abs_power_value():
    a = abs_power([((1, 0), 1.0)], -0.5)
    assert eval_symbol(a, 4.0, 0.0) == pytest.approx(0.5, rel=1e-14)


def test_abs_power_raises_on_zero_set():
    a = abs_power([((1, 0), 1.0)], -0.5)
    with pytest.raises(DomainError, match="0"):
        eval_symbol(a, 0.0, 1.3)


def test_radial_power_raises_at_origin():
    with pytest.raises(DomainError):
        eval_symbol(radial("power", -0.4), 0.0, 0.0)


@given(coord, coord, st.floats(0.01, 10))
def test_polynomial_matches_table(x, w, h):
    table = [(2, 0, 0.25 - 0.1j), (0, 2, 0.25 + 0.1j), (1, 1, 1.5), (2, 2, 0.3), (0, 0, 2.0)]
    p = polynomial(table)
    z = complex(x, w)
    ref = sum(c * z ** a * z.conjugate() ** b for a, b, c in table).real
    assert eval_symbol(p, x, w, h) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@given(coord, coord, st.floats(0, 2 * math.pi))
def test_radial_rotation_invariant(x, w, t):
    a = radial("power", 0.7)
    xr, wr = x * math.cos(t) - w * math.sin(t), x * math.sin(t) + w * math.cos(t)
    assert eval_symbol(a, xr, wr) == pytest.approx(eval_symbol(a, x, w), rel=1e-12, abs=1e-300)


def test_h_independent_symbols_ignore_h(z2):
    assert eval_symbol(z2, 0.3, 0.4, 0.01) == eval_symbol(z2, 0.3, 0.4, 7.0)


def test_non_hermitian_table_rejected():
    with pytest.raises(ValidationError):
        check_hermitian_table((((2,), (0,), 1.0 + 0j),))


def test_shifted_keeps_base(z2):
    s = shifted(z2, 5.0)
    assert s.kind == "polynomial" and s.offset == 5.0 and s.base is z2
    assert eval_symbol(s, 1.0, 1.0) == pytest.approx(7.0)


def test_parse_symbol_round_trip():
    rec = {"id": "q", "kind": "polynomial", "coeffs": [[1, 1, 1.0]], "offset": 2.0,
           "ess_bottom": {"coeff": 0.5, "power": 1}, "semiclassical": {"m": 2, "rho": 0, "N0": 3}}
    s = parse_symbol(rec)
    assert s.name == "q" and s.offset == 2.0 and s.semiclassical.N0 == 3
    assert s.analytic_ess_bottom(0.2) == pytest.approx(0.1)
    assert eval_symbol(s, 1.0, 0.0) == pytest.approx(3.0)


def test_semiclassical_rho_range():
    with pytest.raises(ValidationError):
        parse_symbol({"kind": "constant", "value": 1, "semiclassical": {"m": 0, "rho": 0.5, "N0": 1}})


# ball quadrature ----------------------------------------------------------

def test_nodes_inside_open_ball():
    for dim in (1, 2):
        n = unit_ball_nodes(dim, 16, 64)
        r = np.linalg.norm(n, axis=1)
        assert len(n) >= 1 and r.min() > 0 and r.max() < 1


def test_constant_average():
    assert ball_average(constant(2.5), BallSpec((3.0, -1.0), 0.7)) == pytest.approx(2.5, rel=1e-14)


@pytest.mark.parametrize("r", [0.1, 1.0, 3.0])
def test_modulus_average_closed_form(z2, r, rng):
    got = ball_average(z2, BallSpec((0.0, 0.0), r))
    assert got == pytest.approx(r * r / 2, rel=1e-12)
    assert got == pytest.approx(mc_average(lambda x, w: x * x + w * w, (0, 0), r, rng), rel=5e-3)


@pytest.mark.parametrize("w0", [-4.0, 0.0, 2.5])
def test_x_squared_average_closed_form(x2, w0, rng):
    got = ball_average(x2, BallSpec((0.0, w0), 0.8))
    assert got == pytest.approx(0.16, rel=1e-10)
    assert got == pytest.approx(mc_average(lambda x, w: x * x, (0, w0), 0.8, rng), rel=1e-2)


def test_average_converges_for_smooth_symbol(rng):
    a = radial("gaussian", scale=1.0)
    ball = ((0.4, -0.3), 1.2)
    vals = [ball_average(a, BallSpec(ball[0], ball[1], 8 * k, 16 * k)) for k in (1, 2, 4)]
    ref = mc_average(lambda x, w: np.exp(-(x * x + w * w)), *ball, rng, n=2_000_000)
    assert abs(vals[2] - ref) < 2e-3
    assert abs(vals[2] - vals[1]) < abs(vals[1] - vals[0]) + 1e-12


@given(coord, coord, st.floats(0.1, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_average_linear(x0, w0, r, al, be):
    a, b = radial("power", 1.0), polynomial([(2, 0, 0.5), (0, 2, 0.5)])
    ball = BallSpec((x0, w0), r)
    lhs = ball_average(summed(a, b, al, be), ball)
    rhs = al * ball_average(a, ball) + be * ball_average(b, ball)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@given(coord, coord, st.floats(0.1, 3))
def test_average_monotone(x0, w0, r):
    lo, hi = radial("power", 1.0), shifted(radial("power", 1.0), 0.01)
    ball = BallSpec((x0, w0), r)
    assert ball_average(lo, ball) <= ball_average(hi, ball) + 1e-12


@given(st.floats(0, 2 * math.pi), st.floats(0.1, 5))
def test_average_frame_rotation(t, r):
    a = radial("power", 1.3)
    base = ball_average(a, BallSpec((0.0, 0.0), r))
    assert ball_average(a, BallSpec((0.0, 0.0), r, frame_angle=t)) == pytest.approx(base, rel=1e-10)


def test_overflow_raises():
    a = radial("exp_root", scale=2000.0)
    with pytest.raises(NumericError):
        ball_average(a, BallSpec((1.0, 0.0), 0.5))


def test_dim2_average():
    # |z|^2 over a ball of R^4: mean of |u|^2 is r^2 * 4/6
    a = polynomial([((1, 0), (1, 0), 1.0), ((0, 1), (0, 1), 1.0)], dim=2)
    assert ball_average(a, BallSpec((0, 0, 0, 0), 1.5, 32, 512)) == pytest.approx(1.5 ** 2 * 2 / 3, rel=1e-3)


# Muckenhoupt diagnostics --------------------------------------------------

@pytest.mark.parametrize("c", [1.0, 0.01, 250.0])
def test_ainfty_constant_weight_is_one(c):
    centers = np.array([[0.0, 0.0], [3.0, -2.0], [10.0, 1.0]])
    rep = ainfty_constant(constant(c), 2.0, centers, [0.1, 1.0, 10.0])
    assert rep.constant_estimate == 1.0 and rep.n_balls_sampled == 9


def test_ainfty_inverse_modulus_finite_and_stable():
    w = radial("power", -0.5)
    est = []
    for k in (1, 2):
        c, radii = ainfty_sample(k)
        est.append(ainfty_sweep(w, c, radii)[1].constant_estimate)
    assert all(math.isfinite(e) for e in est)
    assert est[1] / est[0] == pytest.approx(1.0, abs=0.1)


def _ap_interval(t, r):
    """(mean e^x)(mean e^-x) over the disc B((t, 0), r): closed form via Bessel I1."""
    from scipy.special import i1
    m = 2 * i1(r) / r
    return (math.exp(t) * m) * (math.exp(-t) * m)


def test_ainfty_exponential_grows_with_radius():
    w = generic(lambda x, om, h: np.exp(x[..., 0]), name="exp")
    vals = []
    for r in (1.0, 4.0, 10.0):
        c = np.array([[t, 0.0] for t in np.linspace(0, 20, 5)])
        est = ainfty_constant(w, 2.0, c, [r], shells=64, angles=128).constant_estimate
        assert est == pytest.approx(_ap_interval(0.0, r), rel=2e-2)
        vals.append(est)
    assert vals[0] < vals[1] < vals[2] and vals[2] > 100


def test_ainfty_nonintegrable_reports_inf():
    w = abs_power([((1, 0), 1.0)], -3.0)
    rep = ainfty_constant(w, 2.0, [[0.0, 0.0]], [1.0])
    assert math.isinf(rep.constant_estimate) or rep.constant_estimate > 1e3


def test_growth_constant_area():
    fit = growth_check(constant(1.0))
    assert fit.N == pytest.approx(2.0, abs=0.35) and not fit.warning
    ints = np.array(fit.integrals)
    assert np.all(ints <= fit.C * (1 + np.array(fit.radii)) ** fit.N * 1.05)


def test_growth_modulus_squared(z2):
    C, N = growth_check(z2)
    assert N == pytest.approx(4.0, abs=0.6)


def test_growth_superpolynomial_warns():
    fit = growth_check(radial("exp_root", scale=1.0))
    assert fit.warning and fit.N > 10


@pytest.mark.parametrize("sym", [
    polynomial([(1, 1, 1.0)]),
    radial("power", -0.5),
    abs_power([((1, 0), 1.0)], 0.5),
])
def test_doubling_center_independent(sym):
    rng = np.random.default_rng(3)
    # the pre-run fixes the bound; its sample includes the origin, where |z|^2 doubles most
    pre = doubling_ratios(sym, np.vstack([[0.0, 0.0], rng.uniform(-5, 5, size=(30, 2))]), 1.0).max()
    fresh = doubling_ratios(sym, np.vstack([[0.3, -0.2], rng.uniform(-20, 20, size=(30, 2))]), 1.0)
    assert np.all(np.isfinite(fresh)) and fresh.max() <= 1.5 * pre
