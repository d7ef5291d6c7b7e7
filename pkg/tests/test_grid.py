import numpy as np
import pytest

import musielak as mk
from musielak.exceptions import (
    DomainError,
    ParameterError,
    ResolutionError,
    SamplingError,
)


def test_gridspec_spacing_and_positions():
    spec = mk.GridSpec((-2.0,), (2.0,), 129)
    assert spec.h == pytest.approx(4.0 / 128, rel=0, abs=0)
    pts = spec.positions()
    assert pts.shape == (129, 1)
    assert pts[0, 0] == -2.0 and pts[-1, 0] == 2.0
    # dyadic spacing makes interior nodes exact
    assert pts[64, 0] == 0.0


def test_gridspec_2d_c_order():
    spec = mk.GridSpec((0.0, 0.0), (1.0, 1.0), 3)
    pts = spec.positions()
    assert pts.shape == (9, 2)
    # C order: last axis varies fastest
    np.testing.assert_array_equal(pts[0], [0.0, 0.0])
    np.testing.assert_array_equal(pts[1], [0.0, 0.5])
    np.testing.assert_array_equal(pts[3], [0.5, 0.0])


def test_gridspec_validation():
    with pytest.raises(ResolutionError):
        mk.GridSpec((0.0,), (1.0,), 2)
    with pytest.raises(ParameterError):
        mk.GridSpec((1.0,), (0.0,), 9)
    with pytest.raises(ResolutionError):
        mk.GridSpec((0.0, 0.0), (1.0, 2.0), 9)  # unequal extents
    with pytest.raises(ParameterError):
        mk.GridSpec((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 9)  # 3-D unsupported


def test_subsample_strides():
    spec = mk.GridSpec((-2.0,), (2.0,), 129)
    u = mk.sample(mk.tent(center=0.0), spec)
    sub = u.subsample(4)
    assert sub.spec.n == 33
    np.testing.assert_array_equal(sub.values, u.values[::4])
    with pytest.raises(ResolutionError):
        u.subsample(5)  # 5 does not divide 128


def test_boundary_layer_enforced():
    spec = mk.GridSpec((-1.0,), (1.0,), 17)
    vals = np.ones(17)
    with pytest.raises(DomainError):
        mk.GridFunction(spec, vals, zero_outside=True)
    gf = mk.GridFunction(spec, vals, zero_outside=False)
    assert not gf.zero_outside


def test_nonfinite_rejected():
    spec = mk.GridSpec((-1.0,), (1.0,), 17)
    vals = np.zeros(17)
    vals[8] = np.nan
    with pytest.raises(SamplingError):
        mk.GridFunction(spec, vals, zero_outside=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        with pytest.raises(SamplingError):
            mk.sample(lambda pts: 1.0 / (pts[:, 0] - pts[:, 0]), spec)


def test_arithmetic_zero_outside_propagation():
    spec = mk.GridSpec((-3.0,), (1.0,), 65)
    tent = mk.sample(mk.tent(center=-1.0), spec)
    lin = mk.sample(mk.linear(1.0, 0.5), spec, zero_outside=False)
    assert (tent + tent).zero_outside
    assert not (tent + lin).zero_outside
    assert (tent * lin).zero_outside  # product vanishes where tent does
    np.testing.assert_array_equal((tent - tent).values, np.zeros(65))


def test_csv_round_trip_exact():
    spec = mk.GridSpec((-3.05,), (1.05,), 65)
    u = mk.sample(mk.bump(center=-1.0, radius=0.9), spec)
    path = "/tmp/_gf_roundtrip.csv"
    u.to_csv(path)
    v = mk.GridFunction.from_csv(path)
    assert v.spec == u.spec
    assert v.zero_outside == u.zero_outside
    np.testing.assert_array_equal(v.values, u.values)  # bitwise via repr


def test_csv_round_trip_2d():
    spec = mk.GridSpec((-1.0, -1.0), (1.0, 1.0), 17)
    u = mk.sample(mk.bump(center=(0.0, 0.0), radius=0.8), spec)
    path = "/tmp/_gf_roundtrip2.csv"
    u.to_csv(path)
    v = mk.GridFunction.from_csv(path)
    assert v.spec == u.spec
    np.testing.assert_array_equal(v.values, u.values)


def test_domains_contain():
    ball = mk.Ball((0.0,), 1.0)
    pts = np.array([[0.0], [0.999], [1.0], [-1.5]])
    np.testing.assert_array_equal(ball.contains(pts),
                                  [True, True, False, False])
    box = mk.BoxDomain((-1.0,), (1.0,))
    np.testing.assert_array_equal(box.contains(pts),
                                  [True, True, False, False])
    hypo = mk.Hypograph(mk.ConstantBoundary(0.0))
    np.testing.assert_array_equal(
        hypo.contains(np.array([[-0.1], [0.0], [0.1]])), [True, False, False]
    )


def test_hypograph_sine_boundary_2d():
    hypo = mk.Hypograph(mk.SineBoundary(0.5, 0.2, 1.0), dim=2)
    pts = np.array([[0.0, 0.69], [0.0, 0.71], [np.pi / 2, 0.69]])
    got = hypo.contains(pts)
    # boundary height at x'=0 is 0.5 + 0.2*sin(0) = 0.5; at pi/2 it is 0.7
    assert not got[0] or got[0] == (0.69 < 0.5)
    assert got.tolist() == [False, False, True]


def test_support_region_tent():
    spec = mk.GridSpec((-3.05,), (1.05,), 257)
    u = mk.sample(mk.tent(center=-1.0), spec)
    reg = mk.support(u)
    lo_bb, hi_bb = reg.bbox()
    h = spec.h
    assert lo_bb[0] == pytest.approx(-2.0, abs=1.5 * h)
    assert hi_bb[0] == pytest.approx(0.0, abs=1.5 * h)
    assert reg.in_ball(2.0 + 2 * h)
    assert not reg.in_ball(1.5)


def test_region_within_and_inflate():
    spec = mk.GridSpec((-3.05,), (1.05,), 257)
    u = mk.sample(mk.tent(center=-1.0), spec)
    reg = mk.support(u)
    assert reg.within(mk.inflate(reg, 0.25))
    assert not mk.inflate(reg, 0.25).within(reg)
    narrow = mk.support(mk.sample(mk.tent(center=-1.0, halfwidth=0.5), spec))
    # within is sound, not sharp: certainty needs the outer region inflated
    # by at least the cell radius h/2
    assert narrow.within(mk.inflate(reg, spec.h))
    assert not reg.within(mk.inflate(narrow, spec.h))


def test_region_empty():
    spec = mk.GridSpec((-1.0,), (1.0,), 17)
    zero = mk.GridFunction(spec, np.zeros(17))
    reg = mk.support(zero)
    assert reg.is_empty
    assert reg.within(mk.support(zero))


def test_vanishes_outside():
    spec = mk.GridSpec((-3.05,), (1.05,), 257)
    dom = mk.Hypograph(mk.ConstantBoundary(0.0))
    u = mk.sample(mk.tent(center=-1.0), spec)
    assert mk.vanishes_outside(u, dom, tol=0.0)
    shifted = mk.translate(u, mk.axis_shift(-8 * spec.h, 1))  # push outward
    assert not mk.vanishes_outside(shifted, dom, tol=0.0)


def test_clamp():
    spec = mk.GridSpec((-3.05,), (1.05,), 65)
    u = mk.sample(mk.tent(center=-1.0, height=2.0), spec)
    c = mk.clamp(u, 1.0)
    assert np.max(c.values) == 1.0
    assert c.zero_outside
    with pytest.raises(ParameterError):
        mk.clamp(u, 0.0)
