"""Triangles, uniform red refinement and mesh size.

The parent triangle is stored with positive orientation.  Refinement is
uniform red refinement: every element is split into four similar children
by joining its edge midpoints, so after ``level`` steps the mesh is the
barycentric lattice of spacing ``2**-level`` and every element is similar
to the parent.  The lattice is generated directly rather than by repeated
splitting since the two produce the same triangulation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateTriangle

GEOM_EPS = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


def _signed_area(p1, p2, p3) -> float:
    return 0.5 * ((p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1]))


@dataclass(frozen=True)
class Triangle:
    """A non-degenerate, positively oriented triangle."""

    p1: Point2
    p2: Point2
    p3: Point2

    def __post_init__(self):
        pts = [Point2(float(p[0]), float(p[1])) for p in (self.p1, self.p2, self.p3)]
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise DegenerateTriangle(f"non-finite vertex {p}")
        area = _signed_area(*pts)
        if area < 0:
            pts[1], pts[2] = pts[2], pts[1]
            area = -area
        longest = max(math.dist(pts[0], pts[1]), math.dist(pts[1], pts[2]), math.dist(pts[2], pts[0]))
        if longest == 0.0 or area <= GEOM_EPS * longest**2:
            raise DegenerateTriangle(f"degenerate triangle with vertices {tuple(pts)}")
        object.__setattr__(self, "p1", pts[0])
        object.__setattr__(self, "p2", pts[1])
        object.__setattr__(self, "p3", pts[2])

    @property
    def vertices(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3], dtype=float)

    @property
    def area(self) -> float:
        return _signed_area(self.p1, self.p2, self.p3)

    @property
    def edge_lengths(self) -> tuple[float, float, float]:
        """Lengths of the edges opposite p1, p2, p3."""
        return (
            math.dist(self.p2, self.p3),
            math.dist(self.p3, self.p1),
            math.dist(self.p1, self.p2),
        )

    @property
    def longest_edge(self) -> float:
        return max(self.edge_lengths)

    @property
    def m12(self) -> Point2:
        return Point2((self.p1.x + self.p2.x) / 2, (self.p1.y + self.p2.y) / 2)

    @property
    def m23(self) -> Point2:
        return Point2((self.p2.x + self.p3.x) / 2, (self.p2.y + self.p3.y) / 2)

    @property
    def m31(self) -> Point2:
        return Point2((self.p3.x + self.p1.x) / 2, (self.p3.y + self.p1.y) / 2)

    @property
    def midpoints(self) -> tuple[Point2, Point2, Point2]:
        return (self.m12, self.m23, self.m31)

    def scaled(self, s: float) -> "Triangle":
        return Triangle(*(Point2(s * p.x, s * p.y) for p in (self.p1, self.p2, self.p3)))

    def barycentric_gradients(self) -> np.ndarray:
        """Constant gradients of the three barycentric coordinates, shape (3, 2)."""
        return barycentric_gradients(self.vertices[None])[0]

    def to_cartesian(self, lam: np.ndarray) -> np.ndarray:
        """Map barycentric coordinates ``(..., 3)`` to points ``(..., 2)``."""
        return np.asarray(lam) @ self.vertices

    def to_barycentric(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        v = self.vertices
        g = self.barycentric_gradients()
        lam = (xy - v[0]) @ g.T
        lam[..., 0] += 1.0
        return lam


def make_triangle(a: float, b: float) -> Triangle:
    """Triangle with vertices (0, 0), (1, 0) and (a, b)."""
    return Triangle(Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(a, b))


def canonical_form(t: Triangle) -> tuple[float, float, float]:
    """Return ``(a, b, s)`` such that ``t`` is congruent to ``s * make_triangle(a, b)``.

    ``p1`` is sent to the origin and ``p2`` to the positive x-axis; ``s`` is
    the length of the edge p1p2.
    """
    v = t.vertices
    e = v[1] - v[0]
    s = float(np.hypot(*e))
    c, si = e / s
    d = v[2] - v[0]
    a = (c * d[0] + si * d[1]) / s
    b = (-si * d[0] + c * d[1]) / s
    return float(a), float(b), s


def barycentric_gradients(verts: np.ndarray) -> np.ndarray:
    """Barycentric gradients for a batch of triangles ``(n, 3, 2)`` -> ``(n, 3, 2)``."""
    verts = np.asarray(verts, dtype=float)
    x, y = verts[..., 0], verts[..., 1]
    twice_area = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    g = np.empty_like(verts)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        g[:, i, 0] = (y[:, j] - y[:, k]) / twice_area
        g[:, i, 1] = (x[:, k] - x[:, j]) / twice_area
    return g


@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming triangulation of ``parent``.

    ``edges[e]`` holds node indices with the lower index first.  Local edge
    ``k`` of an element is the one opposite its local vertex ``k``;
    ``elem_signs[t, k]`` is +1 when the element's outward normal on that
    edge equals the canonical edge normal (the right-hand normal of the edge
    traversed from lower to higher node index), -1 otherwise.
    """

    nodes: np.ndarray
    elements: np.ndarray
    edges: np.ndarray
    elem_edges: np.ndarray
    elem_signs: np.ndarray
    level: int
    parent: Triangle
    corner_nodes: tuple[int, int, int]
    midpoint_nodes: tuple[int, int, int]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def element_vertices(self) -> np.ndarray:
        return self.nodes[self.elements]

    def element_areas(self) -> np.ndarray:
        v = self.element_vertices()
        return 0.5 * (
            (v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
            - (v[:, 2, 0] - v[:, 0, 0]) * (v[:, 1, 1] - v[:, 0, 1])
        )

    def edge_element_count(self) -> np.ndarray:
        return np.bincount(self.elem_edges.ravel(), minlength=self.n_edges)


def _lattice_index(n: int, i, j):
    return j * (n + 1) - (j * (j - 1)) // 2 + i


def uniform_refine(t: Triangle, level: int) -> Mesh:
    """Refine ``t`` uniformly ``level`` times (4**level similar elements)."""
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    n = 2**level
    ij = np.array([(i, j) for j in range(n + 1) for i in range(n + 1 - j)], dtype=np.int64)
    i, j = ij[:, 0], ij[:, 1]
    v = t.vertices
    w = np.stack([n - i - j, i, j], axis=1).astype(float)
    nodes = (w @ v) / n

    up = [(i_, j_) for j_ in range(n) for i_ in range(n - j_)]
    down = [(i_, j_) for j_ in range(n - 1) for i_ in range(n - 1 - j_)]
    up = np.array(up, dtype=np.int64).reshape(-1, 2)
    down = np.array(down, dtype=np.int64).reshape(-1, 2)
    L = lambda a, b: _lattice_index(n, a, b)  # noqa: E731
    el_up = np.stack([L(up[:, 0], up[:, 1]), L(up[:, 0] + 1, up[:, 1]), L(up[:, 0], up[:, 1] + 1)], axis=1)
    el_dn = np.stack(
        [L(down[:, 0] + 1, down[:, 1]), L(down[:, 0] + 1, down[:, 1] + 1), L(down[:, 0], down[:, 1] + 1)], axis=1
    )
    elements = np.concatenate([el_up, el_dn]).astype(np.int64)

    a = elements[:, [1, 2, 0]]
    b = elements[:, [2, 0, 1]]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    pairs = np.stack([lo.ravel(), hi.ravel()], axis=1)
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    elem_edges = inverse.reshape(-1, 3).astype(np.int64)
    elem_signs = np.where(a < b, 1, -1).astype(np.int8)

    corners = (int(L(0, 0)), int(L(n, 0)), int(L(0, n)))
    mids = (int(L(n // 2, 0)), int(L(n // 2, n // 2)), int(L(0, n // 2)))
    for arr in (nodes, elements, edges, elem_edges, elem_signs):
        arr.setflags(write=False)
    return Mesh(
        nodes=nodes,
        elements=elements,
        edges=edges,
        elem_edges=elem_edges,
        elem_signs=elem_signs,
        level=level,
        parent=t,
        corner_nodes=corners,
        midpoint_nodes=mids,
    )


def mesh_size(m: Mesh) -> float:
    """Largest element diameter, i.e. the maximum longest-edge length."""
    v = m.element_vertices()
    d = np.linalg.norm(v[:, [1, 2, 0]] - v[:, [2, 0, 1]], axis=2)
    return float(d.max())
