import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvelab.errors import InvalidSpecError
from curvelab.objectives import (HessianBound, PiecewiseQuadratic1D, QuadraticSpec,
                                 builtin_objectives, check_declarations, make_logcosh_1d,
                                 make_piecewise_quadratic_1d, make_quadratic,
                                 make_scaled_quadratic_1d, objective_from_dict, random_piecewise)


def test_quadratic_unit():
    obj = make_quadratic(QuadraticSpec((1.0,), (1.0,)))
    assert obj.value(np.array([1.0])) == 0.5
    assert obj.gradient(np.array([1.0])).tolist() == [1.0]
    assert obj.smoothness == 1.0


def test_quadratic_two_modes():
    spec = QuadraticSpec((1.0, 2.0), (1.0, 1.0))
    assert make_quadratic(spec).value(spec.x0) == 1.5


def test_quadratic_zero_eigenvalue():
    obj = make_quadratic(QuadraticSpec((0.0,), (7.0,)))
    assert obj.value(np.array([7.0])) == 0.0
    assert obj.gradient(np.array([7.0])).tolist() == [0.0]


@pytest.mark.parametrize("lam,y0", [((-1.0,), (1.0,)), ((1.0, 2.0), (1.0,)), ((), ())])
def test_quadratic_invalid(lam, y0):
    with pytest.raises(InvalidSpecError):
        QuadraticSpec(lam, y0)


@pytest.mark.parametrize("L,x,f,g", [(1.0, 2.0, 2.0, 2.0), (3.0, 1.0, 1.5, 3.0), (1.0, 0.0, 0.0, 0.0)])
def test_scaled_quadratic(L, x, f, g):
    obj = make_scaled_quadratic_1d(L)
    assert obj.value(np.array([x])) == f
    assert obj.gradient(np.array([x]))[0] == g


@pytest.mark.parametrize("L", [0.0, -1.0, math.inf])
def test_scaled_quadratic_rejects(L):
    with pytest.raises(InvalidSpecError):
        make_scaled_quadratic_1d(L)


def test_logcosh_origin_and_saturation():
    obj = make_logcosh_1d()
    assert obj.value(np.array([0.0])) == 0.0
    assert obj.gradient(np.array([0.0]))[0] == 0.0
    assert obj.gradient(np.array([40.0]))[0] == pytest.approx(1.0, abs=1e-15)
    assert math.isfinite(obj.value(np.array([1e6])))
    assert obj.hessian_bound == HessianBound(1.0, 1.0)


@pytest.mark.parametrize("x", [2.0, -2.0, 0.3, 25.0])
def test_logcosh_matches_high_precision(x):
    mpmath.mp.dps = 50
    obj = make_logcosh_1d()
    f_ref = float(mpmath.log(mpmath.cosh(mpmath.mpf(x))))
    g_ref = float(mpmath.tanh(mpmath.mpf(x)))
    assert obj.value(np.array([x])) == pytest.approx(f_ref, rel=1e-14, abs=1e-15)
    assert obj.gradient(np.array([x]))[0] == pytest.approx(g_ref, rel=1e-15)


@given(st.floats(min_value=0.01, max_value=100.0),
       st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
def test_piecewise_single_segment_is_scaled_quadratic(L, x):
    a = make_piecewise_quadratic_1d(PiecewiseQuadratic1D((), (L,)))
    b = make_scaled_quadratic_1d(L)
    p = np.array([x])
    assert a.value(p) == b.value(p)
    assert a.gradient(p)[0] == b.gradient(p)[0]
    assert a.smoothness == b.smoothness


def test_piecewise_huber_like():
    obj = make_piecewise_quadratic_1d(PiecewiseQuadratic1D((0.0,), (0.0, 1.0), 0.0))
    for x in (-3.0, -0.5, 0.0):
        assert obj.gradient(np.array([x]))[0] == 0.0
        assert obj.value(np.array([x])) == 0.0
    for x in (0.5, 2.0):
        assert obj.gradient(np.array([x]))[0] == x
        assert obj.value(np.array([x])) == pytest.approx(0.5 * x * x)


def test_piecewise_anchors():
    p = PiecewiseQuadratic1D((-1.0, 0.5), (0.2, 0.6, 1.0), gradient_at_zero_offset=0.7)
    obj = make_piecewise_quadratic_1d(p)
    assert obj.value(np.array([0.0])) == 0.0
    assert obj.gradient(np.array([0.0]))[0] == pytest.approx(0.7, abs=1e-15)


@pytest.mark.parametrize("b,m", [((1.0, 0.0), (0.0, 0.5, 1.0)),
                                 ((0.0, 0.0), (0.0, 0.5, 1.0)),
                                 ((0.0,), (1.0, 0.5)),
                                 ((0.0,), (-0.1, 0.5)),
                                 ((0.0,), (0.5,))])
def test_piecewise_invalid(b, m):
    with pytest.raises(InvalidSpecError):
        PiecewiseQuadratic1D(b, m)


def test_piecewise_slope_above_declared_L():
    with pytest.raises(InvalidSpecError):
        PiecewiseQuadratic1D((0.0,), (0.5, 1.5), L=1.0)


piecewise_specs = st.builds(
    lambda seed, L, k: random_piecewise(np.random.default_rng(seed), L, k),
    st.integers(0, 2**32 - 1), st.floats(0.1, 10.0), st.integers(0, 6))


@given(piecewise_specs)
@settings(max_examples=50)
def test_piecewise_value_continuous_at_breakpoints(p):
    obj = make_piecewise_quadratic_1d(p)
    for b in p.breakpoints:
        left = obj.value(np.array([np.nextafter(b, -np.inf)]))
        right = obj.value(np.array([np.nextafter(b, np.inf)]))
        assert abs(left - right) <= 1e-12


@given(piecewise_specs, st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_piecewise_gradient_monotone_and_consistent(p, seed):
    # oracle: sorted sample points, gradient nondecreasing and equal to a
    # central difference of the value away from breakpoints
    obj = make_piecewise_quadratic_1d(p)
    xs = np.sort(np.random.default_rng(seed).uniform(-4.0, 4.0, 200))
    g = np.array([obj.gradient(np.array([x]))[0] for x in xs])
    assert np.all(np.diff(g) >= -1e-12)
    h = 1e-5
    for x, gx in zip(xs, g):
        if min((abs(x - b) for b in p.breakpoints), default=1.0) < 2 * h:
            continue
        fd = (obj.value(np.array([x + h])) - obj.value(np.array([x - h]))) / (2 * h)
        assert fd == pytest.approx(gx, rel=1e-6, abs=1e-7)


def test_builtin_declarations_hold():
    rng = np.random.default_rng(1)
    for obj in builtin_objectives():
        chk = check_declarations(obj, rng, pairs=1000)
        assert chk.convex_ok, (obj.description, chk)
        assert chk.smooth_ok, (obj.description, chk)


def test_declaration_check_catches_wrong_L():
    obj = make_quadratic(QuadraticSpec((3.0,), (1.0,)))
    lying = type(obj)(obj.dimension, obj.value, obj.gradient, smoothness=1.0)
    assert not check_declarations(lying, np.random.default_rng(0), pairs=50).smooth_ok


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_quadratic_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 9))
    spec = QuadraticSpec(tuple(rng.uniform(0.1, 5.0, d)), tuple(rng.uniform(-10, 10, d)))
    obj = make_quadratic(spec)
    x = rng.uniform(-10, 10, d)
    h = 1e-5
    fd = np.array([(obj.value(x + h * e) - obj.value(x - h * e)) / (2 * h) for e in np.eye(d)])
    g = obj.gradient(x)
    assert np.max(np.abs(fd - g)) <= 1e-6 * max(1.0, np.max(np.abs(g)))


@pytest.mark.parametrize("desc", [
    {"kind": "quadratic", "eigenvalues": [1.0, 2.0], "initial_coords": [1.0, -1.0]},
    {"kind": "scaled1d", "L": 3.0},
    {"kind": "logcosh"},
    {"kind": "piecewise1d", "breakpoints": [0.0], "slopes": [0.0, 1.0],
     "gradient_at_zero_offset": 0.25},
])
def test_json_roundtrip(desc):
    obj = objective_from_dict(desc)
    again = objective_from_dict(obj.to_dict())
    for x in (-1.3, 0.0, 2.2):
        p = np.full(obj.dimension, x)
        assert again.value(p) == obj.value(p)


@pytest.mark.parametrize("desc", [{}, {"kind": "cubic"}, {"kind": "scaled1d"},
                                  {"kind": "piecewise1d", "slopes": [1.0, 0.5], "breakpoints": [0]}])
def test_json_invalid(desc):
    with pytest.raises(InvalidSpecError):
        objective_from_dict(desc)


def test_hessian_bound_validation():
    assert HessianBound(2.0, 3.0).L_eff == 6.0
    with pytest.raises(InvalidSpecError):
        HessianBound(0.0, 1.0)
    with pytest.raises(InvalidSpecError):
        HessianBound(1.0, -1.0)
