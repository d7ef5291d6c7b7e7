"""Domains, uniform grids, grid functions and support regions.

Everything here is deliberately explicit about floating-point conventions:
grids are uniform with a single spacing ``h`` shared by all axes, positions
are materialized in C order from ``meshgrid(indexing="ij")``, and geometric
predicates (support regions, containment, distances) operate on grid-aligned
boxes so that the checks the approximation pipeline performs are exact at
grid scale rather than approximate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ParameterError, ResolutionError, SamplingError

__all__ = [
    "FullSpace",
    "Ball",
    "BoxDomain",
    "Hypograph",
    "ConstantBoundary",
    "SineBoundary",
    "GridSpec",
    "GridFunction",
    "Region",
    "sample",
    "support",
    "vanishes_outside",
    "clamp",
]


# -- domains -------------------------------------------------------------------


class FullSpace:
    """All of R^N."""

    def __init__(self, dim=1):
        self.dim = dim

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        return np.ones(points.shape[0], dtype=bool)

    def describe(self):
        return {"kind": "full_space", "dim": self.dim}


class Ball:
    """Open Euclidean ball."""

    def __init__(self, center, radius):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        if radius <= 0:
            raise ParameterError("ball radius must be positive")
        self.radius = float(radius)
        self.dim = len(self.center)

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        d = points - self.center[None, :]
        return np.sqrt(np.sum(d * d, axis=1)) < self.radius

    def describe(self):
        return {
            "kind": "ball",
            "center": [float(c) for c in self.center],
            "radius": self.radius,
        }


class BoxDomain:
    """Open axis-aligned box."""

    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or np.any(self.lo >= self.hi):
            raise ParameterError("box needs lo < hi componentwise")
        self.dim = len(self.lo)

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        return np.all((points > self.lo) & (points < self.hi), axis=1)

    def describe(self):
        return {
            "kind": "box",
            "lo": [float(v) for v in self.lo],
            "hi": [float(v) for v in self.hi],
        }


class ConstantBoundary:
    """xi(x') = c."""

    def __init__(self, c):
        self.c = float(c)

    def __call__(self, prefix):
        return np.full(prefix.shape[0], self.c)

    def describe(self):
        return {"kind": "constant", "c": self.c}


class SineBoundary:
    """xi(x') = offset + amp * sin(freq * sum(x')); constant when N = 1."""

    def __init__(self, offset, amp, freq):
        self.offset = float(offset)
        self.amp = float(amp)
        self.freq = float(freq)

    def __call__(self, prefix):
        s = np.sum(prefix, axis=1) if prefix.shape[1] else np.zeros(prefix.shape[0])
        return self.offset + self.amp * np.sin(self.freq * s)

    def describe(self):
        return {
            "kind": "sine",
            "offset": self.offset,
            "amp": self.amp,
            "freq": self.freq,
        }


class Hypograph:
    """Open hypograph {x : x_N < xi(x_1, ..., x_{N-1})} of a boundary profile."""

    def __init__(self, boundary, dim=1):
        self.boundary = boundary
        self.dim = dim

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        prefix = points[:, :-1]
        return points[:, -1] < self.boundary(prefix)

    def describe(self):
        return {
            "kind": "hypograph",
            "dim": self.dim,
            "boundary": self.boundary.describe(),
        }


# -- grids ---------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Uniform Cartesian grid: n nodes per axis on the box [lo, hi].

    The spacing h = (hi - lo) / (n - 1) must agree across axes.
    """

    lo: tuple
    hi: tuple
    n: int

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or len(lo) not in (1, 2):
            raise ParameterError("grid must be 1- or 2-dimensional")
        if self.n < 3:
            raise ResolutionError("grid needs at least 3 nodes per axis")
        spans = [b - a for a, b in zip(lo, hi)]
        if min(spans) <= 0:
            raise ParameterError("grid box needs lo < hi componentwise")
        if max(spans) - min(spans) > 1e-12 * max(spans):
            raise ResolutionError(
                "axis extents differ; spacing must be equal across axes"
            )

    @property
    def dim(self):
        return len(self.lo)

    @property
    def h(self):
        return (self.hi[0] - self.lo[0]) / (self.n - 1)

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def n_nodes(self):
        return self.n ** self.dim

    def axis(self, a=0):
        return np.linspace(self.lo[a], self.hi[a], self.n)

    def positions(self):
        """All node positions, shape (n**dim, dim), C order."""
        axes = [self.axis(a) for a in range(self.dim)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def subsampled(self, stride):
        if stride == 1:
            return self
        if (self.n - 1) % stride != 0:
            raise ResolutionError(
                "stride %d does not divide n-1 = %d" % (stride, self.n - 1)
            )
        return GridSpec(self.lo, self.hi, (self.n - 1) // stride + 1)

    def describe(self):
        return {"lo": list(self.lo), "hi": list(self.hi), "n": self.n}


def _boundary_mask(shape):
    mask = np.zeros(shape, dtype=bool)
    for axis in range(len(shape)):
        idx_lo = [slice(None)] * len(shape)
        idx_lo[axis] = 0
        idx_hi = [slice(None)] * len(shape)
        idx_hi[axis] = shape[axis] - 1
        mask[tuple(idx_lo)] = True
        mask[tuple(idx_hi)] = True
    return mask


class GridFunction:
    """Node values of a function on a :class:`GridSpec`.

    ``zero_outside`` asserts that the function vanishes identically outside
    the grid box; the constructor enforces the matching discrete invariant
    that every boundary-layer node is exactly zero, so that translation and
    mollification cannot silently lose mass over the edge.
    """

    def __init__(self, spec, values, zero_outside=True):
        self.spec = spec
        values = np.asarray(values, dtype=float)
        if values.shape != spec.shape:
            raise ParameterError(
                "values shape %r does not match grid shape %r"
                % (values.shape, spec.shape)
            )
        if not np.all(np.isfinite(values)):
            raise SamplingError("grid function holds non-finite values")
        if zero_outside:
            boundary = values[_boundary_mask(spec.shape)]
            if np.any(boundary != 0.0):
                raise DomainError(
                    "zero_outside claimed but %d boundary nodes are nonzero"
                    % int(np.count_nonzero(boundary))
                )
        self.values = values
        self.zero_outside = bool(zero_outside)

    # -- conveniences ------------------------------------------------------

    @property
    def h(self):
        return self.spec.h

    @property
    def dim(self):
        return self.spec.dim

    def flat(self):
        return self.values.ravel()

    def positions(self):
        return self.spec.positions()

    def _check_same_spec(self, other):
        if self.spec != other.spec:
            raise ParameterError("grid functions live on different grids")

    def __add__(self, other):
        self._check_same_spec(other)
        return GridFunction(
            self.spec,
            self.values + other.values,
            zero_outside=self.zero_outside and other.zero_outside,
        )

    def __sub__(self, other):
        self._check_same_spec(other)
        return GridFunction(
            self.spec,
            self.values - other.values,
            zero_outside=self.zero_outside and other.zero_outside,
        )

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check_same_spec(other)
            return GridFunction(
                self.spec,
                self.values * other.values,
                zero_outside=self.zero_outside or other.zero_outside,
            )
        return GridFunction(
            self.spec, self.values * float(other), zero_outside=self.zero_outside
        )

    __rmul__ = __mul__

    def subsample(self, stride):
        sub = self.spec.subsampled(stride)
        slicer = (slice(None, None, stride),) * self.dim
        return GridFunction(sub, self.values[slicer], zero_outside=self.zero_outside)

    # -- serialization -------------------------------------------------------

    def to_csv(self, path):
        """Write a flat node-major CSV with a single header comment row."""
        lo = ",".join(repr(v) for v in self.spec.lo)
        hi = ",".join(repr(v) for v in self.spec.hi)
        lines = [
            "# dim=%d n=%d h=%s zero_outside=%d lo=%s hi=%s"
            % (self.dim, self.spec.n, repr(self.spec.h),
               int(self.zero_outside), lo, hi)
        ]
        lines.extend(repr(float(v)) for v in self.values.ravel())
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("# "):
                raise ParameterError("missing grid header in %s" % path)
            fields = dict(
                item.split("=", 1) for item in header[2:].split(" ") if "=" in item
            )
            dim = int(fields["dim"])
            n = int(fields["n"])
            lo = tuple(float(v) for v in fields["lo"].split(","))
            hi = tuple(float(v) for v in fields["hi"].split(","))
            zero_outside = bool(int(fields["zero_outside"]))
            values = np.array([float(line) for line in fh if line.strip()])
        if len(lo) != dim or len(hi) != dim:
            raise ParameterError("grid header is inconsistent in %s" % path)
        spec = GridSpec(lo, hi, n)
        if abs(spec.h - float(fields["h"])) > 1e-12 * spec.h:
            raise ParameterError("stored spacing disagrees with box/n")
        return cls(spec, values.reshape(spec.shape), zero_outside=zero_outside)


def sample(fn, spec, zero_outside=None):
    """Sample a callable fn(points) on the grid nodes.

    ``fn`` receives positions of shape (M, dim) and must return M finite
    values.  When ``zero_outside`` is omitted it is inferred from the
    boundary layer.
    """
    pts = spec.positions()
    vals = np.asarray(fn(pts), dtype=float).reshape(-1)
    if vals.shape != (spec.n_nodes,):
        raise SamplingError(
            "sampler returned %r values for %d nodes" % (vals.shape, spec.n_nodes)
        )
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmax(~np.isfinite(vals)))
        raise SamplingError(
            "non-finite sample at node %d, position %s" % (bad, pts[bad])
        )
    values = vals.reshape(spec.shape)
    if zero_outside is None:
        zero_outside = bool(np.all(values[_boundary_mask(spec.shape)] == 0.0))
    return GridFunction(spec, values, zero_outside=zero_outside)


# -- support regions -----------------------------------------------------------


class Region:
    """A union of grid cells, optionally inflated by a radius r.

    The region is the Minkowski sum of the active closed cells with the
    closed Euclidean ball of radius ``r``.  Distances to the cell union are
    exact; containment checks use the triangle-inequality bound
    ``max_{p in cell} dist(p, U) <= dist(center, U) + cell_radius`` so a True
    answer is always sound.
    """

    def __init__(self, lo, h, active, r=0.0):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.h = float(h)
        self.active = np.asarray(active, dtype=bool)
        self.r = float(r)
        if self.r < 0:
            raise ParameterError("inflation radius must be nonnegative")
        self.dim = self.active.ndim
        self._boxes = None

    @classmethod
    def from_gridfunction(cls, gf, threshold=0.0):
        vals = np.abs(gf.values) > threshold
        if gf.dim == 1:
            active = vals[:-1] | vals[1:]
        else:
            active = (
                vals[:-1, :-1] | vals[1:, :-1] | vals[:-1, 1:] | vals[1:, 1:]
            )
        return cls(gf.spec.lo, gf.spec.h, active)

    @property
    def is_empty(self):
        return not bool(np.any(self.active))

    @property
    def n_active(self):
        return int(np.count_nonzero(self.active))

    def inflated(self, extra):
        return Region(self.lo, self.h, self.active, self.r + float(extra))

    def boxes(self):
        """Active cells merged into maximal axis-aligned runs."""
        if self._boxes is not None:
            return self._boxes
        out = []
        if self.dim == 1:
            out.extend(self._runs_1d(self.active, ()))
        else:
            for i in range(self.active.shape[0]):
                out.extend(self._runs_1d(self.active[i], (i,)))
        self._boxes = out
        return out

    def _runs_1d(self, row, prefix):
        boxes = []
        idx = np.flatnonzero(row)
        if len(idx) == 0:
            return boxes
        starts = [idx[0]]
        ends = []
        gaps = np.flatnonzero(np.diff(idx) > 1)
        for gpos in gaps:
            ends.append(idx[gpos])
            starts.append(idx[gpos + 1])
        ends.append(idx[-1])
        for s, e in zip(starts, ends):
            if prefix:
                i = prefix[0]
                lo = np.array([self.lo[0] + i * self.h, self.lo[1] + s * self.h])
                hi = np.array(
                    [self.lo[0] + (i + 1) * self.h, self.lo[1] + (e + 1) * self.h]
                )
            else:
                lo = np.array([self.lo[0] + s * self.h])
                hi = np.array([self.lo[0] + (e + 1) * self.h])
            boxes.append((lo, hi))
        return boxes

    def bbox(self):
        """Bounding box of the inflated region; None when empty."""
        if self.is_empty:
            return None
        boxes = self.boxes()
        lo = np.min(np.stack([b[0] for b in boxes]), axis=0) - self.r
        hi = np.max(np.stack([b[1] for b in boxes]), axis=0) + self.r
        return lo, hi

    def cell_distance(self, points):
        """Exact Euclidean distance from each point to the cell union."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None] if self.dim == 1 else points[None, :]
        boxes = self.boxes()
        if not boxes:
            return np.full(points.shape[0], np.inf)
        best = np.full(points.shape[0], np.inf)
        for lo, hi in boxes:
            gap = np.maximum(lo[None, :] - points, 0.0)
            gap = np.maximum(gap, points - hi[None, :])
            best = np.minimum(best, np.sqrt(np.sum(gap * gap, axis=1)))
        return best

    def distance(self, points):
        """Distance to the inflated region (zero inside)."""
        return np.maximum(self.cell_distance(points) - self.r, 0.0)

    def contains_points(self, points):
        return self.distance(points) <= 0.0

    def _cell_geometry(self):
        idx = np.argwhere(self.active).astype(float)
        centers = self.lo[None, :] + (idx + 0.5) * self.h
        radius = 0.5 * self.h * np.sqrt(self.dim)
        return centers, radius

    def within(self, other):
        """Sound check that this inflated region lies inside ``other``.

        Returns True only when containment is certain; a False may be a
        near-miss at sub-cell scale.
        """
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        centers, radius = self._cell_geometry()
        reach = other.cell_distance(centers) + radius + self.r
        if bool(np.all(reach <= other.r + 1e-12)):
            return True
        return False

    def in_ball(self, radius, center=None):
        """Exact check that the inflated region lies in a closed ball."""
        if self.is_empty:
            return True
        center = (
            np.zeros(self.dim)
            if center is None
            else np.atleast_1d(np.asarray(center, dtype=float))
        )
        worst = 0.0
        for lo, hi in self.boxes():
            corners = np.stack(
                np.meshgrid(*[(lo[a], hi[a]) for a in range(self.dim)],
                            indexing="ij"),
                axis=-1,
            ).reshape(-1, self.dim)
            d = np.sqrt(np.sum((corners - center[None, :]) ** 2, axis=1))
            worst = max(worst, float(np.max(d)))
        return worst + self.r <= radius + 1e-12

    def describe(self):
        bb = self.bbox()
        return {
            "n_active": self.n_active,
            "r": self.r,
            "bbox": None if bb is None else [list(map(float, b)) for b in bb],
        }


def support(gf, threshold=0.0):
    """Support region of a grid function: cells with a node above threshold."""
    return Region.from_gridfunction(gf, threshold=threshold)


def vanishes_outside(gf, domain, tol=0.0):
    """True when |u| <= tol at every node outside the domain."""
    pts = gf.positions()
    inside = domain.contains(pts)
    vals = np.abs(gf.flat())
    return bool(np.all(vals[~inside] <= tol))


def clamp(gf, level):
    """Symmetric magnitude clamp at the given level."""
    if level <= 0:
        raise ParameterError("clamp level must be positive")
    return GridFunction(
        gf.spec,
        np.clip(gf.values, -level, level),
        zero_outside=gf.zero_outside,
    )
