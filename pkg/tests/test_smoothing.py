import math

import numpy as np
import pytest

import musielak as mk
from musielak.exceptions import (
    AlignmentError,
    DomainError,
    ParameterError,
    ResolutionError,
)


def _tent(n=257, box=(-3.05, 1.05)):
    spec = mk.GridSpec((box[0],), (box[1],), n)
    return spec, mk.sample(mk.tent(center=-1.0), spec)


# -- translate -------------------------------------------------------------------


def test_translate_node_mapping_exact():
    spec, u = _tent()
    k = 5
    shifted = mk.translate(u, mk.axis_shift(k * spec.h, 1))
    np.testing.assert_array_equal(shifted.values[:-k], u.values[k:])
    np.testing.assert_array_equal(shifted.values[-k:], np.zeros(k))


def test_translate_negative_shift():
    spec, u = _tent()
    k = 3
    shifted = mk.translate(u, (-k * spec.h,))
    np.testing.assert_array_equal(shifted.values[k:], u.values[:-k])
    np.testing.assert_array_equal(shifted.values[:k], np.zeros(k))


def test_translate_round_trip_identity():
    spec, u = _tent()
    there = mk.translate(u, (4 * spec.h,))
    back = mk.translate(there, (-4 * spec.h,))
    np.testing.assert_array_equal(back.values, u.values)


def test_translate_alignment_error():
    spec, u = _tent()
    with pytest.raises(AlignmentError):
        mk.translate(u, (1.5 * spec.h,))


def test_translate_domain_masking():
    # function crossing the boundary: mask keeps x and x + shift inside
    spec = mk.GridSpec((-2.0,), (2.0,), 129)
    dom = mk.Hypograph(mk.ConstantBoundary(0.0))
    u = mk.sample(mk.bump(center=-0.2, radius=0.5), spec, zero_outside=True)
    shift = 8 * spec.h
    out = mk.translate(u, (shift,), dom)
    pts = spec.positions()[:, 0]
    rolled = np.zeros_like(u.values)
    rolled[:-8] = u.values[8:]
    keep = (pts < 0.0) & (pts + shift < 0.0)
    np.testing.assert_array_equal(out.values, np.where(keep, rolled, 0.0))


def test_translate_2d_axis_default_is_last():
    spec = mk.GridSpec((-1.0, -1.0), (1.0, 1.0), 17)
    u = mk.sample(mk.bump(center=(0.0, 0.0), radius=0.6), spec)
    out = mk.translate(u, mk.axis_shift(2 * spec.h, 2))
    np.testing.assert_array_equal(out.values[:, :-2], u.values[:, 2:])


# -- cutoff ----------------------------------------------------------------------


def test_cutoff_plateau_and_support():
    pts = np.linspace(-4.0, 4.0, 801)[:, None]
    tau1 = mk.cutoff_values(1, pts)
    inside = np.abs(pts[:, 0]) <= 1.0
    outside = np.abs(pts[:, 0]) >= 2.0
    assert np.all(tau1[inside] == 1.0)
    assert np.all(tau1[outside] == 0.0)
    ring = ~inside & ~outside
    assert np.all((tau1[ring] >= 0.0) & (tau1[ring] <= 1.0))
    # strictly between on the central band (the glue saturates to 1.0 in
    # float64 within ~0.05 of the inner edge, which is fine)
    band = (np.abs(pts[:, 0]) >= 1.25) & (np.abs(pts[:, 0]) <= 1.75)
    assert np.all((tau1[band] > 0.0) & (tau1[band] < 1.0))
    # radially monotone on the ring
    right = tau1[pts[:, 0] > 0]
    assert np.all(np.diff(right) <= 1e-15)


def test_cutoff_monotone_in_j():
    pts = np.linspace(-4.0, 4.0, 801)[:, None]
    tau1 = mk.cutoff_values(1, pts)
    tau2 = mk.cutoff_values(2, pts)
    assert np.all(tau2 >= tau1 - 1e-15)


def test_cutoff_gridfunction_requires_padding():
    spec = mk.GridSpec((-3.05,), (1.05,), 65)
    with pytest.raises(DomainError):
        mk.cutoff(3, spec)  # box must contain B_{j+1}
    spec_ok = mk.GridSpec((-4.5,), (4.5,), 65)
    tau = mk.cutoff(3, spec_ok)
    assert tau.values.max() == 1.0


def test_cutoff_slope_constant():
    c = mk.cutoff_slope(1)
    assert c == pytest.approx(2.0, abs=0.05)
    assert mk.cutoff_slope(3) == pytest.approx(c, abs=0.05)


def test_cutoff_2d_radial():
    pts = np.array([[0.0, 0.5], [0.9, 1.2], [2.2, 2.3]])
    tau = mk.cutoff_values(1, pts)
    assert tau[0] == 1.0                      # |x| = 0.5 <= 1
    assert tau[1] == pytest.approx(0.5)       # |x| = 1.5, midpoint of the glue
    assert tau[2] == 0.0                      # |x| > 2


# -- mollify ---------------------------------------------------------------------


def test_mollifier_weights_structure():
    offs, w = mk.mollifier_weights(0.2, 0.05, 1)
    assert np.sum(w) == pytest.approx(1.0, abs=1e-14)
    assert np.all(w > 0.0)
    # strict support: |m h| < eps
    assert np.all(np.abs(offs[:, 0] * 0.05) < 0.2)
    # symmetric taps
    order = np.argsort(offs[:, 0])
    np.testing.assert_array_equal(offs[order, 0], -offs[order, 0][::-1])
    np.testing.assert_allclose(w[order], w[order][::-1], rtol=1e-15)


def test_mollifier_weights_2d_count():
    offs, w = mk.mollifier_weights(0.1, 0.05, 2)
    # offsets live strictly inside the euclidean disk of radius eps/h = 2
    assert set(map(tuple, offs.tolist())) == {
        (-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1),
        (1, -1), (1, 0), (1, 1),
    }
    assert np.sum(w) == pytest.approx(1.0, abs=1e-14)


def test_mollify_resolution_floor():
    spec, u = _tent(65)
    with pytest.raises(ResolutionError):
        mk.mollify(u, 1.9 * spec.h)


def test_mollify_preserves_linear_in_interior():
    spec = mk.GridSpec((-2.0,), (2.0,), 257)
    u = mk.sample(mk.linear(2.0, 0.3), spec, zero_outside=False)
    eps = 8 * spec.h
    out = mk.mollify(u, eps)
    pts = spec.positions()[:, 0]
    interior = np.abs(pts) <= 2.0 - 2 * eps
    np.testing.assert_allclose(out.values[interior], u.values[interior],
                               rtol=0, atol=1e-12)


def test_mollify_support_growth_bounded():
    spec, u = _tent()
    eps = 4 * spec.h
    out = mk.mollify(u, eps)
    supp_u = mk.support(u)
    supp_out = mk.support(out)
    assert supp_out.within(mk.inflate(supp_u, eps))
    assert supp_u.within(mk.inflate(supp_out, eps))


def test_mollify_2d_smoke():
    spec = mk.GridSpec((-1.0, -1.0), (1.0, 1.0), 33)
    u = mk.sample(mk.bump(center=(0.0, 0.0), radius=0.5), spec)
    out = mk.mollify(u, 3 * spec.h)
    assert out.zero_outside
    assert out.values.max() < u.values.max()  # averaging lowers the peak
    assert out.values.sum() == pytest.approx(u.values.sum(), rel=1e-10)


# -- params and margins ----------------------------------------------------------


def test_smoothing_params_validate():
    h = 0.01
    good = mk.SmoothingParams(delta=2 * h, j=2, epsilon=2 * h, sigma=0.1)
    good.validate(h)
    with pytest.raises(ResolutionError):
        mk.SmoothingParams(delta=0.5 * h, j=2, epsilon=2 * h,
                           sigma=0.1).validate(h)
    with pytest.raises(AlignmentError):
        mk.SmoothingParams(delta=2.5 * h, j=2, epsilon=2 * h,
                           sigma=0.1).validate(h)
    with pytest.raises(ResolutionError):
        mk.SmoothingParams(delta=2 * h, j=2, epsilon=h, sigma=0.1).validate(h)
    with pytest.raises(ParameterError):
        mk.SmoothingParams(delta=2 * h, j=0, epsilon=2 * h,
                           sigma=0.1).validate(h)
    with pytest.raises(ParameterError):
        mk.SmoothingParams(delta=2 * h, j=2, epsilon=2 * h,
                           sigma=0.0).validate(h)


def test_hypograph_margin_matches_translation_depth():
    spec, u = _tent(1025)
    dom = mk.Hypograph(mk.ConstantBoundary(0.0))
    h = spec.h
    touching = mk.hypograph_margin(mk.support(u), 3.0, dom)
    assert touching <= h
    k = 12
    deep = mk.translate(u, (k * h,), dom)
    margin = mk.hypograph_margin(mk.support(deep), 3.0, dom)
    assert k * h - 2 * h <= margin <= k * h + h


def test_hypograph_margin_monotone_in_depth():
    spec, u = _tent(513)
    dom = mk.Hypograph(mk.ConstantBoundary(0.0))
    margins = []
    for k in (4, 8, 16):
        deep = mk.translate(u, (k * spec.h,), dom)
        margins.append(mk.hypograph_margin(mk.support(deep), 3.0, dom))
    assert margins[0] < margins[1] < margins[2]


def test_hypograph_margin_2d_sine_boundary():
    spec = mk.GridSpec((-2.0, -2.0), (2.0, 2.0), 65)
    dom = mk.Hypograph(mk.SineBoundary(1.5, 0.2, 1.0), dim=2)
    u = mk.sample(mk.bump(center=(0.0, 0.0), radius=0.5), spec)
    margin = mk.hypograph_margin(mk.support(u), 2.5, dom)
    # boundary height over the support is at least 1.3; support radius ~0.5
    assert 0.5 <= margin <= 1.5
