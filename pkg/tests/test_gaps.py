import math

import numpy as np
import pytest

from antiwick.errors import ValidationError
from antiwick.gaps import (SearchConfig, c_r_profile, default_shells, discreteness_indicator,
                           gap_values, lambda_ess_gap, lambda_gap, lambda_sup_ess_gap,
                           lambda_sup_gap)
from antiwick.harness import shell_profile_csv
from antiwick.symbols import constant, dilated, polynomial, radial, shifted, translated

HS = (1e-3, 0.1, 1.0)


@pytest.mark.parametrize("fn", [lambda_gap, lambda_sup_gap, lambda_ess_gap, lambda_sup_ess_gap])
def test_constant_everywhere(fn):
    assert fn(constant(2.0), 0.3).value == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("h", HS)
def test_lambda_modulus_squared(z2, h):
    est = lambda_gap(z2, h)
    assert abs(est.value - h / 2) <= 1e-3 * h
    assert np.linalg.norm(est.center) < 1e-3
    assert "half-width" in est.caveat


@pytest.mark.parametrize("h", HS)
def test_lambda_x_squared(x2, h):
    est = lambda_gap(x2, h)
    assert est.value == pytest.approx(h / 4, rel=1e-2)
    assert abs(est.center[0]) < 1e-3 * max(1.0, math.sqrt(h))


@pytest.mark.parametrize("h", HS)
def test_lambda_sup_modulus_squared(z2, h):
    assert lambda_sup_gap(z2, h).value == pytest.approx(h, rel=2e-2)


def test_lambda_sup_x_squared(x2):
    assert lambda_sup_gap(x2, 0.5).value == pytest.approx(0.5, rel=2e-2)


def test_ess_x_squared_along_frequency_axis(x2):
    h = 0.2
    est = lambda_ess_gap(x2, h, default_shells(h))
    assert est.value == pytest.approx(h / 4, rel=1e-2) and not est.diverging
    for R, v, c in est.profile:
        assert v == pytest.approx(h / 4, rel=1e-2) and abs(c[0]) < 1e-3 * R


def test_ess_modulus_squared_diverges(z2):
    est = lambda_ess_gap(z2, 1.0)
    vals = [v for _, v, _ in est.profile]
    assert est.diverging and math.isinf(est.value) and vals[-1] > 10 * vals[0]


def test_ess_cap_flags_divergence(z2):
    est = lambda_ess_gap(z2, 1.0, cfg=SearchConfig(cap=50.0, growth_factor=1e9))
    assert math.isinf(est.value)


def test_ess_slow_growth_diverges():
    # |z| grows like R, so dyadic shells never decelerate
    assert lambda_ess_gap(radial("power", 0.5), 1e-3).diverging


def test_ess_offset_growth_diverges(z2):
    assert lambda_ess_gap(shifted(z2, 5.0), 1e-3).diverging


def test_sup_ess(x2, z2):
    assert lambda_sup_ess_gap(x2, 0.5).value == pytest.approx(0.5, rel=2e-2)
    assert math.isinf(lambda_sup_ess_gap(z2, 0.5).value)


def test_shell_validation(z2):
    with pytest.raises(ValidationError):
        lambda_ess_gap(z2, 1.0, (1.0, 2.0))
    with pytest.raises(ValidationError):
        lambda_ess_gap(z2, 1.0, (1.0, 4.0, 2.0))
    with pytest.raises(ValidationError):
        discreteness_indicator(z2, 1.0, (1.0, 2.0, 4.0))


def test_search_config_validation():
    with pytest.raises(ValidationError):
        SearchConfig(half_width=-1.0)
    with pytest.raises(ValidationError):
        SearchConfig(max_iter=0)


def test_c_r_modulus_squared(z2):
    got = c_r_profile(z2, (0.25, 0.5, 1.0))
    for r, v in got.items():
        assert v == pytest.approx(r * r / 2, rel=5e-3)


def test_c_r_constant():
    assert all(v == pytest.approx(4.0) for v in c_r_profile(constant(4.0), (0.3, 1.0)).values())


def test_c_r_radius_range(z2):
    with pytest.raises(ValidationError):
        c_r_profile(z2, (1.5,))


def test_c_r_scaling_covariance(z2):
    w2 = dilated(z2, 2.0)
    for r in (0.25, 0.5):
        assert c_r_profile(w2, (r,))[r] == pytest.approx(c_r_profile(z2, (2 * r,))[2 * r], rel=1e-3)


@pytest.mark.parametrize("s", [2.0, 4.0])
def test_lambda_scaling_law(z2, s):
    h = 0.01
    assert lambda_gap(dilated(z2, s), h).value == pytest.approx(lambda_gap(z2, s * s * h).value, rel=1e-3)


def test_translation_invariance():
    a = radial("power", 1.0)
    v = np.array([1.3, -0.7])
    base = lambda_gap(a, 0.5)
    moved = lambda_gap(translated(a, v), 0.5)
    assert moved.value == pytest.approx(base.value, abs=1e-6)
    assert np.allclose(np.array(moved.center) - np.array(base.center), v, atol=1e-3)


@pytest.mark.parametrize("fn", [lambda_gap, lambda_sup_gap, lambda_ess_gap, lambda_sup_ess_gap])
def test_monotone(x2, fn):
    lo, hi = fn(x2, 0.3).value, fn(shifted(x2, 0.01), 0.3).value
    assert lo <= hi + 1e-9


@pytest.mark.parametrize("sym", [polynomial([(1, 1, 1.0)]), polynomial([(2, 0, .25), (1, 1, .5), (0, 2, .25)]),
                                 radial("power", 0.5), radial("power", 2.0), constant(1.0)])
def test_refinement_stability(sym):
    h = 0.1
    coarse = lambda_gap(sym, h, SearchConfig(coarse=41)).value
    fine = lambda_gap(sym, h, SearchConfig(coarse=81)).value
    assert fine == pytest.approx(coarse, rel=1e-2)


def test_ordering_invariants(x2):
    vals = gap_values(x2, 0.5)
    assert vals.lam.value <= vals.lam_ess.value + 1e-9
    assert vals.lam.value <= vals.lam_sup.value + 1e-9


def test_decaying_symbol_infimum_uses_shells():
    vals = gap_values(radial("power", -0.4), 1.0)
    assert vals.lam.value <= vals.lam_ess.value + 1e-9


@pytest.mark.parametrize("sym,verdict", [
    (polynomial([(1, 1, 1.0)]), "discrete"),
    (radial("power", 2.0), "discrete"),
    (polynomial([(2, 0, .25), (1, 1, .5), (0, 2, .25)]), "not-discrete"),
    (constant(1.0), "not-discrete"),
])
def test_discreteness(sym, verdict):
    got, prof = discreteness_indicator(sym, 1.0)
    assert got == verdict and len(prof) == 4


def test_deterministic(z2):
    a, b = lambda_gap(z2, 0.37), lambda_gap(z2, 0.37)
    assert a.value == b.value and a.center == b.center


def test_dim2_modulus_squared():
    a = polynomial([((1, 0), (1, 0), 1.0), ((0, 1), (0, 1), 1.0)], dim=2)
    assert lambda_gap(a, 0.5).value == pytest.approx(0.5 * 2 / 3, rel=2e-3)


def test_disc_region(z2):
    est = lambda_gap(translated(z2, (3.0, 0.0)), 1.0, SearchConfig(half_width=1.0, region="disc"))
    assert np.linalg.norm(est.center) <= 1.0 + 1e-12
    assert est.value == pytest.approx(4.0 + 0.5, rel=1e-3)


def test_shell_profile_export(x2):
    text = shell_profile_csv(lambda_ess_gap(x2, 1.0).profile)
    lines = text.strip().splitlines()
    assert lines[0] == "shell_radius,value" and len(lines) == 5
