"""Kernel backend selection and shared deterministic reductions.

The compiled Cython backend is preferred when its extension imports; the
numpy reference backend is always available and is forced by setting the
environment variable ``MUSIELAK_PURE`` (any nonempty value) before import.

Both backends return per-row partial sums.  The reduction of rows to a
single number happens here, through a fixed pairwise tree that does not
depend on backend or thread count, so a given backend produces
byte-identical results at any ``--threads`` setting.
"""

from __future__ import annotations

import os

import numpy as np

from . import reference

_impl = reference
_backend = "reference"
if not os.environ.get("MUSIELAK_PURE"):
    try:
        from . import _core

        _impl = _core
        _backend = "compiled"
    except ImportError:
        pass

__all__ = [
    "backend_name",
    "available_backends",
    "get_backend",
    "frac_rows",
    "pair_rows",
    "tree_sum",
]


def backend_name():
    """Name of the active backend: "compiled" or "reference"."""
    return _backend


def available_backends():
    names = ["reference"]
    try:
        from . import _core  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Fetch a backend module by name (for tests and benchmarks)."""
    if name == "reference":
        return reference
    if name == "compiled":
        from . import _core

        return _core
    raise ValueError("unknown backend %r" % (name,))


def frac_rows(positions, values, grads, lam, s, h, family, params,
              diag_levels, threads=1):
    return _impl.frac_rows(
        np.ascontiguousarray(positions, dtype=float),
        np.ascontiguousarray(values, dtype=float),
        np.ascontiguousarray(grads, dtype=float),
        float(lam), float(s), float(h), int(family),
        np.ascontiguousarray(params, dtype=float),
        int(diag_levels), int(threads),
    )


def pair_rows(positions, pair_values, lam, h, family, params, diag_levels):
    # Takes a Python callable, so this always runs on the reference backend.
    return reference.pair_rows(
        np.ascontiguousarray(positions, dtype=float),
        pair_values, float(lam), float(h), int(family),
        np.ascontiguousarray(params, dtype=float), int(diag_levels),
    )


def tree_sum(values):
    """Sum by a fixed pairwise tree; order independent of callers' threading.

    Odd levels are padded with 0.0.  The result is deterministic for a given
    input array, which pins CSV outputs across thread counts.
    """
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            a = np.concatenate([a, [0.0]])
        a = a[0::2] + a[1::2]
    return float(a[0])
