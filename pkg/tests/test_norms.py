import math

import numpy as np
import pytest

import musielak as mk
from musielak.exceptions import ParameterError


def _window_on_dyadic_grid(value=2.0):
    # h = 4/128 is dyadic, window edges land on nodes, measure exactly 1.0
    spec = mk.GridSpec((-2.0,), (2.0,), 129)
    return mk.sample(mk.windowed_constant(-1.5, -0.5, value=value), spec)


def test_constant_window_closed_form():
    u = _window_on_dyadic_grid(value=2.0)
    for p in (2.0, 3.0):
        nf = mk.variable_exponent(("constant", p))
        res = mk.luxemburg_norm(nf, u, residual=True)
        want = 2.0 * 1.0 ** (1.0 / p)
        assert res.value == pytest.approx(want, rel=1e-9)
        assert res.collapsed and res.iterations == 0
        assert res.modular_at_norm == pytest.approx(1.0, rel=1e-12)


def test_collapse_only_for_constant_exponent():
    u = _window_on_dyadic_grid()
    res = mk.luxemburg_norm(mk.variable_exponent(("cosine", 2.5, 0.4, 1.0)),
                            u, residual=True)
    assert not res.collapsed and res.iterations > 0
    assert 0.999 <= res.modular_at_norm <= 1.0 + 1e-12


def test_norm_of_zero_function():
    spec = mk.GridSpec((-2.0,), (2.0,), 65)
    zero = mk.GridFunction(spec, np.zeros(65))
    nf = mk.orlicz(q=2.0)
    res = mk.luxemburg_norm(nf, zero)
    assert res.value == 0.0
    assert mk.gagliardo_seminorm(nf, zero, 0.5).value == 0.0
    assert mk.sobolev_norm(nf, zero, 0.5) == 0.0


def test_initial_bracket_is_sound():
    # scaling identity: J(u) = m brackets the norm by m**(1/g+-)
    u = _window_on_dyadic_grid()
    for nf in (mk.variable_exponent(("cosine", 2.5, 0.4, 1.0)),
               mk.orlicz(q=2.0)):
        m = mk.scalar_modular_value(nf, u, 1.0)
        lo = min(m ** (1.0 / nf.g_minus), m ** (1.0 / nf.g_plus))
        hi = max(m ** (1.0 / nf.g_minus), m ** (1.0 / nf.g_plus))
        assert mk.scalar_modular_value(nf, u, hi) <= 1.0 + 1e-12
        assert mk.scalar_modular_value(nf, u, lo) >= 1.0 - 1e-12


def test_homogeneity_power_of_two_exact():
    u = _window_on_dyadic_grid()
    tent = mk.sample(mk.tent(center=-1.0), mk.GridSpec((-2.0,), (2.0,), 129))
    for nf in (mk.variable_exponent(("constant", 2.0)),
               mk.variable_exponent(("constant", 3.0))):
        for g in (u, tent):
            n1 = mk.luxemburg_norm(nf, g).value
            n2 = mk.luxemburg_norm(nf, g + g).value
            assert n2 == pytest.approx(2.0 * n1, rel=1e-14)


def test_homogeneity_general_scale():
    tent = mk.sample(mk.tent(center=-1.0), mk.GridSpec((-2.0,), (2.0,), 129))
    nf = mk.variable_exponent(("cosine", 2.5, 0.4, 1.0))
    base = mk.luxemburg_norm(nf, tent, rel_tol=1e-10).value
    for c in (0.5, 3.0, 7.25):
        scaled = mk.GridFunction(tent.spec, c * tent.values)
        got = mk.luxemburg_norm(nf, scaled, rel_tol=1e-10).value
        assert got == pytest.approx(c * base, rel=1e-8)


def test_gagliardo_seminorm_collapse_value():
    # for constant p the Luxemburg scale of the fractional modular is m**(1/p)
    spec = mk.GridSpec((-3.05,), (1.05,), 257)
    u = mk.sample(mk.tent(center=-1.0), spec)
    nf = mk.variable_exponent(("constant", 2.0))
    m = mk.frac_modular_value(nf, u, 0.25)
    res = mk.gagliardo_seminorm(nf, u, 0.25)
    assert res.collapsed
    assert res.value == pytest.approx(math.sqrt(m), rel=1e-14)


def test_sobolev_norm_is_sum_of_parts():
    spec = mk.GridSpec((-3.05,), (1.05,), 257)
    u = mk.sample(mk.bump(center=-1.0, radius=0.9), spec)
    nf = mk.orlicz(q=2.0)
    lux, semi = mk.sobolev_parts(nf, u, 0.25)
    assert mk.sobolev_norm(nf, u, 0.25) == lux.value + semi.value
    assert lux.value > 0.0 and semi.value > 0.0


def test_unit_modular_residual_band(families, corpus):
    for nf in families.values():
        if nf.family == "step_exponent":
            continue
        for u in corpus.values():
            res = mk.luxemburg_norm(nf, u, residual=True)
            assert 0.999 <= res.modular_at_norm <= 1.001


def test_holder_pairing(corpus):
    nf = mk.variable_exponent(("constant", 2.0))
    pairs = [("tent", "bump"), ("tent", "window"), ("bump", "tent_shift")]
    for a, b in pairs:
        out = mk.holder_pairing(nf, corpus[a], corpus[b])
        assert out["holds"]
        assert out["lhs"] <= out["rhs"] * (1.0 + 1e-10) + 1e-12
        assert out["rhs"] == 2.0 * out["norm_u"] * out["norm_v_conjugate"]


def test_norm_modular_equivalence(families, corpus):
    nf = families["cos"]
    out = mk.norm_modular_equivalence(nf, list(corpus.values()), 0.25)
    assert out["verdict"]
    assert len(out["rows"]) == len(corpus)


def test_luxemburg_guard_expansion():
    # tiny function: modular at lambda=1 far below 1; bracket must expand down
    spec = mk.GridSpec((-2.0,), (2.0,), 65)
    u = mk.sample(mk.tent(center=0.0, height=1e-6), spec)
    nf = mk.variable_exponent(("cosine", 2.5, 0.4, 1.0))
    res = mk.luxemburg_norm(nf, u, residual=True)
    assert res.value < 1e-4
    assert 0.999 <= res.modular_at_norm <= 1.0 + 1e-12


def test_rel_tol_validation():
    spec = mk.GridSpec((-2.0,), (2.0,), 65)
    u = mk.sample(mk.tent(center=0.0), spec)
    nf = mk.variable_exponent(("constant", 2.0))
    with pytest.raises(ParameterError):
        mk.luxemburg_norm(nf, u, rel_tol=0.0)
