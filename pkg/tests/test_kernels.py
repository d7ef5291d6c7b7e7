import math
import os
import subprocess
import sys

import numpy as np
import pytest

import musielak as mk
from musielak import _kernels


HAVE_COMPILED = "compiled" in mk.available_backends()

needs_compiled = pytest.mark.skipif(
    not HAVE_COMPILED, reason="compiled kernel unavailable"
)


def _tent_inputs(n=257, dim=1):
    if dim == 1:
        spec = mk.GridSpec((-3.05,), (1.05,), n)
        u = mk.sample(mk.tent(center=-1.0), spec)
        grads = np.gradient(u.values, spec.h).reshape(-1, 1)
    else:
        spec = mk.GridSpec((-2.0, -2.0), (2.0, 2.0), n)
        u = mk.sample(mk.tent(center=(0.0, 0.0)), spec)
        g0, g1 = np.gradient(u.values, spec.h, spec.h)
        grads = np.stack([g0.ravel(), g1.ravel()], axis=-1)
    return spec, u, grads


def test_tree_sum_is_fixed_pairwise():
    # pairwise tree: fl(fl(1 + 1e16) + fl(-1e16 + 1)) = 0, whereas a left
    # fold yields 1; the exact zero freezes the reduction order
    vals = np.array([1.0, 1e16, -1e16, 1.0])
    assert _kernels.tree_sum(vals) == 0.0
    assert _kernels.tree_sum(np.array([42.0])) == 42.0
    assert _kernels.tree_sum(np.array([])) == 0.0
    # odd length pads with zero, it does not wrap around
    assert _kernels.tree_sum(np.array([1e16, 1.0, -1e16])) == 0.0


def test_backend_registry():
    assert "reference" in mk.available_backends()
    ref = _kernels.get_backend("reference")
    assert ref.NAME == "reference"
    with pytest.raises(Exception):
        _kernels.get_backend("no-such-backend")


@pytest.mark.parametrize("fam", ["p2", "cos", "orlicz", "prod"])
def test_reference_rows_match_inline_brute(fam, families):
    nf = families[fam]
    spec, u, grads = _tent_inputs(n=33)
    pos = spec.positions()
    vals = u.values.ravel()
    s, lam, h = 0.25, 1.3, spec.h
    ref = _kernels.get_backend("reference")
    rows = ref.frac_rows(pos, vals, grads, lam, s, h,
                         nf.kernel_id, nf.kernel_params, 0, 1)
    x = pos[:, 0]
    for i in range(len(x)):
        acc = 0.0
        for j in range(len(x)):
            if j == i:
                continue
            r = abs(x[i] - x[j])
            t = abs(vals[i] - vals[j]) / (lam * r ** s)
            acc += mk.eval_G(nf, x[i], x[j], t) * h * h / r
        assert rows[i] == pytest.approx(acc, rel=1e-12, abs=1e-300)


def test_diag_correction_linear_profile_closed_form():
    # for u with constant slope c and G = t^2 the level-l diagonal term is
    # h * (c * w**(1-s))**2 with w = h / 2**l, summed over levels
    nf = mk.variable_exponent(("constant", 2.0))
    spec = mk.GridSpec((-1.0,), (1.0,), 33)
    c = 0.7
    u = mk.sample(mk.linear(c), spec, zero_outside=False)
    grads = np.gradient(u.values, spec.h).reshape(-1, 1)
    s, h = 0.25, spec.h
    ref = _kernels.get_backend("reference")
    with_diag = ref.frac_rows(spec.positions(), u.values, grads, 1.0, s, h,
                              nf.kernel_id, nf.kernel_params, 3, 1)
    without = ref.frac_rows(spec.positions(), u.values, grads, 1.0, s, h,
                            nf.kernel_id, nf.kernel_params, 0, 1)
    per_node = sum(
        h * (c * (h / 2.0 ** lev) ** (1.0 - s)) ** 2 for lev in (1, 2, 3)
    )
    got = with_diag - without
    np.testing.assert_allclose(got, per_node, rtol=1e-12)


@needs_compiled
@pytest.mark.parametrize("fam", ["p2", "cos", "orlicz", "prod"])
def test_backends_agree_1d(fam, families):
    nf = families[fam]
    spec, u, grads = _tent_inputs(n=257)
    args = (spec.positions(), u.values.ravel(), grads, 1.0, 0.25, spec.h,
            nf.kernel_id, nf.kernel_params, 4)
    ref = _kernels.get_backend("reference").frac_rows(*args, 1)
    com = _kernels.get_backend("compiled").frac_rows(*args, 1)
    np.testing.assert_allclose(com, ref, rtol=5e-13, atol=1e-300)


@needs_compiled
def test_backends_agree_2d():
    nf = mk.variable_exponent(("cosine", 2.5, 0.4, 1.0), dim=2)
    spec, u, grads = _tent_inputs(n=33, dim=2)
    args = (spec.positions(), u.values.ravel(), grads, 1.0, 0.4, spec.h,
            nf.kernel_id, nf.kernel_params, 3)
    ref = _kernels.get_backend("reference").frac_rows(*args, 1)
    com = _kernels.get_backend("compiled").frac_rows(*args, 1)
    np.testing.assert_allclose(com, ref, rtol=5e-13, atol=1e-300)


@needs_compiled
def test_compiled_thread_count_is_bitwise_invariant():
    nf = mk.variable_exponent(("cosine", 2.5, 0.4, 1.0))
    spec, u, grads = _tent_inputs(n=513)
    com = _kernels.get_backend("compiled")
    args = (spec.positions(), u.values.ravel(), grads, 1.0, 0.25, spec.h,
            nf.kernel_id, nf.kernel_params, 4)
    r1 = com.frac_rows(*args, 1)
    r4 = com.frac_rows(*args, 4)
    np.testing.assert_array_equal(r1, r4)


def test_reference_thread_arg_is_inert():
    nf = mk.variable_exponent(("constant", 2.0))
    spec, u, grads = _tent_inputs(n=129)
    ref = _kernels.get_backend("reference")
    args = (spec.positions(), u.values.ravel(), grads, 1.0, 0.25, spec.h,
            nf.kernel_id, nf.kernel_params, 4)
    np.testing.assert_array_equal(ref.frac_rows(*args, 1),
                                  ref.frac_rows(*args, 3))


def test_frac_modular_backend_gap_within_promise(families):
    # end to end: the dispatching wrapper vs the reference backend
    spec, u, _ = _tent_inputs(n=257)
    for fam in ("p2", "orlicz"):
        nf = families[fam]
        active = mk.frac_modular_value(nf, u, 0.25)
        ref = _kernels.get_backend("reference")
        grads = np.gradient(u.values, spec.h).reshape(-1, 1)
        rows = ref.frac_rows(spec.positions(), u.values.ravel(), grads, 1.0,
                             0.25, spec.h, nf.kernel_id, nf.kernel_params,
                             4, 1)
        assert active == pytest.approx(_kernels.tree_sum(rows), rel=5e-13)


def test_pair_rows_smooth_two_point_function():
    # v(x, y) = x - y with G = t^2 integrates |x-y|^2 / |x-y| = r over the
    # unit square: closed form 1/3.  The node-product rule is first order
    # here (the integrand is only Lipschitz across the diagonal), so pin the
    # order and the Richardson extrapolant rather than a single value.
    nf = mk.variable_exponent(("constant", 2.0))
    exact = 1.0 / 3.0
    vals = {}
    for n in (257, 513, 1025):
        spec = mk.GridSpec((0.0,), (1.0,), n)
        vals[n] = mk.modular_pair(nf, lambda x, y: x - y, spec, levels=1).value
    errs = [abs(vals[n] - exact) for n in (257, 513, 1025)]
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.05)
    richardson = 2.0 * vals[1025] - vals[513]
    assert richardson == pytest.approx(exact, rel=1e-4)
    assert vals[1025] == pytest.approx(exact, rel=1e-2)

    # v = (x - y)^2 integrates r^3: closed form 1/10, same first-order rate
    spec = mk.GridSpec((0.0,), (1.0,), 513)
    v513 = mk.modular_pair(nf, lambda x, y: (x - y) ** 2, spec, levels=1).value
    spec = mk.GridSpec((0.0,), (1.0,), 1025)
    v1025 = mk.modular_pair(nf, lambda x, y: (x - y) ** 2, spec, levels=1).value
    assert 2.0 * v1025 - v513 == pytest.approx(0.1, rel=2e-4)


def test_env_var_forces_reference_backend():
    code = "import musielak; print(musielak.backend_name())"
    env = dict(os.environ, MUSIELAK_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "reference"

    env.pop("MUSIELAK_PURE")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    expected = "compiled" if HAVE_COMPILED else "reference"
    assert out.stdout.strip() == expected
