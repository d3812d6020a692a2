"""Domain descriptions and their rasterization onto a uniform lattice.

Domains are small immutable records (:class:`DomainSpec`).  A domain is
rasterized with :func:`rasterize` into a :class:`Grid`: the lattice points
``k * h`` lying strictly inside the domain, together with the fraction of a
grid step separating every node from the boundary along each axis.  Those
fractions feed the cut-cell stencil in :mod:`spectral_gaps.discretize`.

Euclidean domains live in the first quadrant/octant with one corner at the
origin (rectangle, box, L-shape), except the disk, which is centred at the
origin.  ``hyperbolic_rect`` is a coordinate rectangle in the upper
half-plane model, carrying the metric ``(dx^2 + dy^2) / y^2``.
"""

from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np

from .errors import EmptyGrid, InvalidDomain

__all__ = [
    "DomainSpec",
    "Grid",
    "rectangle",
    "square",
    "box",
    "cube",
    "disk",
    "l_shape",
    "polygon",
    "hyperbolic_rect",
    "rasterize",
    "volume",
]

KINDS = ("rectangle", "box", "disk", "l_shape", "polygon", "hyperbolic_rect")

# distance (in units of h) under which a lattice point counts as on the boundary
_ON_BOUNDARY = 1e-10
# vertical shift (in units of h) of the even-odd test ray
_RAY_EPS = 1e-12


@dataclass(frozen=True)
class DomainSpec:
    """Declarative description of a bounded domain.

    Parameters
    ----------
    kind : str
        One of ``rectangle``, ``box``, ``disk``, ``l_shape``, ``polygon``,
        ``hyperbolic_rect``.
    params : tuple
        Shape parameters; see the factory functions (:func:`rectangle`,
        :func:`disk`, ...) for their meaning.
    n : int
        Dimension of the ambient space.
    """

    kind: str
    params: tuple
    n: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidDomain(f"unknown domain kind {self.kind!r}")
        expected_n = 3 if self.kind == "box" else 2
        if self.n != expected_n:
            raise InvalidDomain(
                f"{self.kind} domains have dimension {expected_n}, got n={self.n}"
            )
        if self.kind == "polygon":
            verts = tuple(tuple(float(c) for c in v) for v in self.params)
            if len(verts) > 1 and verts[0] == verts[-1]:
                verts = verts[:-1]
            object.__setattr__(self, "params", verts)
            _validate_polygon(verts)
            return
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if not all(math.isfinite(p) for p in params):
            raise InvalidDomain("domain parameters must be finite")
        nparams = {"rectangle": 2, "box": 3, "disk": 1, "l_shape": 2,
                   "hyperbolic_rect": 4}[self.kind]
        if len(params) != nparams:
            raise InvalidDomain(
                f"{self.kind} takes {nparams} parameters, got {len(params)}"
            )
        if self.kind == "hyperbolic_rect":
            x0, x1, y0, y1 = params
            if not (x1 > x0 and y1 > y0):
                raise InvalidDomain("hyperbolic_rect needs x0 < x1 and y0 < y1")
            if y0 <= 0:
                raise InvalidDomain("hyperbolic_rect needs y0 > 0")
            return
        if min(params) <= 0:
            raise InvalidDomain("all lengths must be strictly positive")
        if self.kind == "l_shape" and params[1] >= params[0]:
            raise InvalidDomain("l_shape arm width must be smaller than its length")

    @property
    def is_hyperbolic(self):
        return self.kind == "hyperbolic_rect"

    def bounds(self):
        """Axis-aligned bounding box as two arrays ``(lo, hi)``."""
        p = self.params
        if self.kind == "rectangle":
            return np.zeros(2), np.array(p)
        if self.kind == "box":
            return np.zeros(3), np.array(p)
        if self.kind == "disk":
            return -np.full(2, p[0]), np.full(2, p[0])
        if self.kind == "l_shape":
            return np.zeros(2), np.full(2, p[0])
        if self.kind == "hyperbolic_rect":
            return np.array([p[0], p[2]]), np.array([p[1], p[3]])
        verts = np.array(p)
        return verts.min(axis=0), verts.max(axis=0)

    def vertices(self):
        """Polygon vertices (``polygon`` and ``l_shape`` only)."""
        if self.kind == "polygon":
            return np.array(self.params)
        if self.kind == "l_shape":
            length, width = self.params
            return np.array([(0.0, 0.0), (length, 0.0), (length, width),
                             (width, width), (width, length), (0.0, length)])
        raise InvalidDomain(f"{self.kind} is not polygonal")

    def to_dict(self):
        params = [list(v) for v in self.params] if self.kind == "polygon" else list(self.params)
        return {"kind": self.kind, "params": params, "n": self.n}

    @classmethod
    def from_dict(cls, data):
        try:
            kind = data["kind"]
            params = data["params"]
            n = int(data.get("n", 3 if kind == "box" else 2))
        except (KeyError, TypeError) as exc:
            raise InvalidDomain(f"malformed domain description: {data!r}") from exc
        if kind == "polygon":
            params = tuple(tuple(v) for v in params)
        return cls(kind, tuple(params), n)


def rectangle(a, b):
    """The rectangle ``[0, a] x [0, b]``."""
    return DomainSpec("rectangle", (a, b), 2)


def square(side=1.0):
    return rectangle(side, side)


def box(a, b, c):
    """The box ``[0, a] x [0, b] x [0, c]``."""
    return DomainSpec("box", (a, b, c), 3)


def cube(side=1.0):
    return box(side, side, side)


def disk(radius=1.0):
    """Disk of the given radius centred at the origin."""
    return DomainSpec("disk", (radius,), 2)


def l_shape(length=2.0, width=1.0):
    """Union of ``[0, length] x [0, width]`` and ``[0, width] x [0, length]``."""
    return DomainSpec("l_shape", (length, width), 2)


def polygon(vertices):
    """Simple polygon given by its vertex list (implicitly closed)."""
    return DomainSpec("polygon", tuple(tuple(v) for v in vertices), 2)


def hyperbolic_rect(x0, x1, y0, y1):
    """Coordinate rectangle ``[x0, x1] x [y0, y1]`` of the half-plane model."""
    return DomainSpec("hyperbolic_rect", (x0, x1, y0, y1), 2)


def volume(domain):
    """Riemannian volume of the domain.

    Closed forms for the analytic shapes, the shoelace formula for
    polygons, and ``(x1 - x0) * (1/y0 - 1/y1)`` for a half-plane rectangle.

    >>> volume(hyperbolic_rect(0, 1, 1, 2))
    0.5
    """
    p = domain.params
    if domain.kind == "rectangle":
        return p[0] * p[1]
    if domain.kind == "box":
        return p[0] * p[1] * p[2]
    if domain.kind == "disk":
        return math.pi * p[0] ** 2
    if domain.kind == "l_shape":
        return 2.0 * p[0] * p[1] - p[1] ** 2
    if domain.kind == "hyperbolic_rect":
        x0, x1, y0, y1 = p
        return (x1 - x0) * (1.0 / y0 - 1.0 / y1)
    if domain.kind == "polygon":
        v = np.array(p)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    raise InvalidDomain(f"unknown domain kind {domain.kind!r}")


# ---------------------------------------------------------------------------
# polygon helpers


def _segments_intersect(p1, p2, q1, q2):
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    def on_segment(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and on_segment(p1, p2, q1)) or (o2 == 0 and on_segment(p1, p2, q2))
            or (o3 == 0 and on_segment(q1, q2, p1)) or (o4 == 0 and on_segment(q1, q2, p2)))


def _validate_polygon(verts):
    m = len(verts)
    if m < 3:
        raise InvalidDomain("a polygon needs at least 3 vertices")
    if any(len(v) != 2 for v in verts):
        raise InvalidDomain("polygon vertices must be 2-D points")
    if not all(math.isfinite(c) for v in verts for c in v):
        raise InvalidDomain("polygon vertices must be finite")
    edges = [(verts[i], verts[(i + 1) % m]) for i in range(m)]
    if any(a == b for a, b in edges):
        raise InvalidDomain("polygon has a repeated vertex")
    for i in range(m):
        for j in range(i + 1, m):
            adjacent = j == i + 1 or (i == 0 and j == m - 1)
            if adjacent:
                # adjacent edges may only share their common vertex
                a, b = edges[i]
                c, d = edges[j]
                shared = b if j == i + 1 else a
                other_i = a if j == i + 1 else b
                other_j = d if j == i + 1 else c
                cross = ((other_i[0] - shared[0]) * (other_j[1] - shared[1])
                         - (other_i[1] - shared[1]) * (other_j[0] - shared[0]))
                dot = ((other_i[0] - shared[0]) * (other_j[0] - shared[0])
                       + (other_i[1] - shared[1]) * (other_j[1] - shared[1]))
                if cross == 0 and dot > 0:
                    raise InvalidDomain("polygon edges fold back onto each other")
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                raise InvalidDomain("polygon is self-intersecting")
    v = np.array(verts)
    area = 0.5 * abs(np.dot(v[:, 0], np.roll(v[:, 1], -1)) - np.dot(np.roll(v[:, 0], -1), v[:, 1]))
    if area == 0:
        raise InvalidDomain("polygon has zero area")


def _point_segment_distance(pts, a, b):
    ab = b - a
    t = np.clip(((pts - a) @ ab) / (ab @ ab), 0.0, 1.0)
    closest = a + t[:, None] * ab
    return np.linalg.norm(pts - closest, axis=1)


def _polygon_contains(verts, pts, h):
    x, y = pts[:, 0], pts[:, 1] + _RAY_EPS * h
    inside = np.zeros(len(pts), dtype=bool)
    near = np.zeros(len(pts), dtype=bool)
    m = len(verts)
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        crosses = (a[1] > y) != (b[1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_int = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
        inside ^= crosses & (x_int > x)
        near |= _point_segment_distance(pts, a, b) <= _ON_BOUNDARY * h
    return inside & ~near


def _polygon_ray_distance(verts, pts, axis, sign):
    """Distance along ``sign * e_axis`` from each point to the first edge hit."""
    other = 1 - axis
    best = np.full(len(pts), np.inf)
    m = len(verts)
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        if a[other] == b[other]:
            continue  # edge parallel to the ray
        lo, hi = sorted((a[other], b[other]))
        c = pts[:, other]
        hit = (c >= lo) & (c <= hi)
        s = (c - a[other]) / (b[other] - a[other])
        coord = a[axis] + s * (b[axis] - a[axis])
        t = sign * (coord - pts[:, axis])
        ok = hit & (t > 0)
        best = np.where(ok & (t < best), t, best)
    return best


# ---------------------------------------------------------------------------
# rasterization


def _contains(domain, pts, h):
    tol = _ON_BOUNDARY * h
    kind = domain.kind
    if kind in ("rectangle", "box", "hyperbolic_rect"):
        lo, hi = domain.bounds()
        return np.all((pts > lo + tol) & (pts < hi - tol), axis=1)
    if kind == "disk":
        r = domain.params[0]
        return np.linalg.norm(pts, axis=1) < r - tol
    return _polygon_contains(domain.vertices(), pts, h)


def _ray_distance(domain, pts, axis, sign):
    kind = domain.kind
    if kind in ("rectangle", "box", "hyperbolic_rect"):
        lo, hi = domain.bounds()
        return hi[axis] - pts[:, axis] if sign > 0 else pts[:, axis] - lo[axis]
    if kind == "disk":
        r = domain.params[0]
        xa = pts[:, axis]
        disc = xa ** 2 + r ** 2 - np.sum(pts ** 2, axis=1)
        return -sign * xa + np.sqrt(np.maximum(disc, 0.0))
    return _polygon_ray_distance(domain.vertices(), pts, axis, sign)


@dataclass(frozen=True, eq=False)
class Grid:
    """Interior lattice nodes of a rasterized domain.

    Attributes
    ----------
    domain : DomainSpec
    h : float
        Lattice spacing.
    lattice : ndarray of int, shape (N, n)
        Integer lattice coordinates; node ``i`` sits at ``lattice[i] * h``.
    boundary_fractions : ndarray, shape (N, n, 2)
        ``[i, axis, 0]`` is the distance (in units of ``h``) from node ``i``
        to the next node or boundary point in the ``-axis`` direction,
        ``[i, axis, 1]`` the same towards ``+axis``.  Entries are 1 exactly
        when that neighbour is an interior node.
    neighbors : ndarray of int, shape (N, n, 2)
        Index of the neighbouring interior node, or -1 across the boundary.
    """

    domain: DomainSpec
    h: float
    lattice: np.ndarray
    boundary_fractions: np.ndarray
    neighbors: np.ndarray

    @property
    def size(self):
        return len(self.lattice)

    @property
    def n(self):
        return self.lattice.shape[1]

    @property
    def coords(self):
        return self.lattice * self.h

    @property
    def is_hyperbolic(self):
        return self.domain.is_hyperbolic

    @cached_property
    def index_map(self):
        return {tuple(int(c) for c in row): i for i, row in enumerate(self.lattice)}

    @property
    def cut(self):
        """Boolean mask of nodes with at least one boundary neighbour."""
        return np.any(self.neighbors < 0, axis=(1, 2))


def rasterize(domain, h):
    """Collect the lattice points ``k * h`` strictly inside ``domain``.

    Parameters
    ----------
    domain : DomainSpec
    h : float
        Lattice spacing; must resolve the domain's narrowest feature, and be
        below ``y0`` for a half-plane rectangle.

    Returns
    -------
    Grid

    Raises
    ------
    EmptyGrid
        If no lattice point lies inside the domain.
    InvalidDomain
        For a non-positive spacing or ``h >= y0`` on a hyperbolic domain.

    Examples
    --------
    >>> rasterize(square(), 0.25).size
    9
    """
    h = float(h)
    if not (h > 0 and math.isfinite(h)):
        raise InvalidDomain(f"grid spacing must be positive, got {h}")
    if domain.is_hyperbolic and h >= domain.params[2]:
        raise InvalidDomain("hyperbolic grids need h < y0")
    lo, hi = domain.bounds()
    kmin = np.floor(lo / h).astype(np.int64)
    kmax = np.ceil(hi / h).astype(np.int64)
    axes = [np.arange(a, b + 1) for a, b in zip(kmin, kmax)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    shape = mesh.shape[:-1]
    cand = mesh.reshape(-1, domain.n)
    mask = _contains(domain, cand * h, h)
    if not mask.any():
        raise EmptyGrid(f"no interior lattice point for {domain.kind} at h={h}")
    lattice = cand[mask]
    nnodes = len(lattice)

    # padded dense lookup: lattice coordinate -> node index (or -1)
    lookup = np.full(tuple(s + 2 for s in shape), -1, dtype=np.int64)
    inner = tuple(slice(1, -1) for _ in shape)
    lookup[inner] = np.where(mask, 0, -1).reshape(shape)
    flat = lookup[inner].reshape(-1)
    flat[mask] = np.arange(nnodes)
    lookup[inner] = flat.reshape(shape)

    offs = lattice - kmin + 1
    neighbors = np.empty((nnodes, domain.n, 2), dtype=np.int64)
    fractions = np.ones((nnodes, domain.n, 2))
    pts = lattice * h
    for axis in range(domain.n):
        for side, sign in ((0, -1), (1, 1)):
            shifted = offs.copy()
            shifted[:, axis] += sign
            nb = lookup[tuple(shifted.T)]
            neighbors[:, axis, side] = nb
            cut = nb < 0
            if cut.any():
                t = _ray_distance(domain, pts[cut], axis, sign) / h
                fractions[cut, axis, side] = np.clip(t, _ON_BOUNDARY, 1.0)
    return Grid(domain, h, lattice, fractions, neighbors)
