"""Finite balls of the (q+1)-homogeneous tree.

Vertices are numbered breadth-first from the reference point ``o`` (index 0);
children of a vertex are numbered in creation order, so two balls built with
the same ``(q, R)`` are identical.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "TreeBall",
    "build_ball",
    "ball_size",
    "confluence",
    "distance",
    "geodesic",
]

_INDEX_MAX = np.iinfo(np.intp).max


def ball_size(q, R):
    """Number of vertices in the ball of radius ``R``, as a Python int."""
    if R == 0:
        return 1
    return 1 + (q + 1) * (q**R - 1) // (q - 1)


@dataclass(frozen=True, eq=False)
class TreeBall:
    """Ball of radius ``R`` around the root of the tree of degree ``q + 1``.

    Attributes
    ----------
    q : int
        Branching parameter; every vertex of the infinite tree has ``q + 1``
        neighbours.
    R : int
        Radius of the ball.
    depth : ndarray of int, shape (n_vertices,)
        Distance of each vertex from the root.
    parent : ndarray of int, shape (n_vertices,)
        Parent index, ``-1`` for the root.
    children : tuple of tuple of int
        Child indices in creation order.
    """

    q: int
    R: int
    depth: np.ndarray
    parent: np.ndarray
    children: tuple

    @property
    def n_vertices(self):
        return len(self.depth)

    def __len__(self):
        return len(self.depth)

    def sphere(self, j):
        """Indices of the vertices at depth ``j``, in canonical order."""
        return np.flatnonzero(self.depth == j)

    @cached_property
    def ancestors(self):
        """Table ``A[v, k]`` of the depth-``k`` ancestor of ``v`` (``-1`` if ``k > |v|``)."""
        n = self.n_vertices
        table = np.full((n, self.R + 1), -1, dtype=np.intp)
        table[0, 0] = 0
        # parents precede children in BFS order
        for v in range(1, n):
            d = self.depth[v]
            table[v, :d] = table[self.parent[v], :d]
            table[v, d] = v
        table.flags.writeable = False
        return table

    def _check_vertex(self, v):
        if not 0 <= v < self.n_vertices:
            raise IndexError(f"vertex {v} is not in a ball with {self.n_vertices} vertices")


def build_ball(q, R):
    """Build the ball of radius ``R`` in the homogeneous tree of degree ``q + 1``.

    Parameters
    ----------
    q : int
        Branching parameter, at least 2.
    R : int
        Radius, at least 0.

    Returns
    -------
    TreeBall

    Raises
    ------
    ValueError
        If ``q < 2`` or ``R < 0``.
    OverflowError
        If the vertex count does not fit the platform index type.

    Examples
    --------
    >>> build_ball(2, 3).n_vertices
    22
    """
    if int(q) != q or q < 2:
        raise ValueError(f"q must be an integer >= 2, got {q!r}")
    if int(R) != R or R < 0:
        raise ValueError(f"R must be a non-negative integer, got {R!r}")
    q, R = int(q), int(R)
    n = ball_size(q, R)
    if n > _INDEX_MAX:
        raise OverflowError(f"ball with q={q}, R={R} has {n} vertices, beyond the index range")

    depth = np.zeros(n, dtype=np.intp)
    parent = np.full(n, -1, dtype=np.intp)
    children = [[] for _ in range(n)]
    frontier = [0]
    nxt = 1
    for d in range(1, R + 1):
        new_frontier = []
        for v in frontier:
            for _ in range(q + 1 if v == 0 else q):
                depth[nxt] = d
                parent[nxt] = v
                children[v].append(nxt)
                new_frontier.append(nxt)
                nxt += 1
        frontier = new_frontier

    depth.flags.writeable = False
    parent.flags.writeable = False
    return TreeBall(q, R, depth, parent, tuple(tuple(c) for c in children))


def confluence(ball, x, y):
    """Deepest common vertex of the root paths ``[o, x]`` and ``[o, y]``."""
    ball._check_vertex(x)
    ball._check_vertex(y)
    while ball.depth[x] > ball.depth[y]:
        x = ball.parent[x]
    while ball.depth[y] > ball.depth[x]:
        y = ball.parent[y]
    while x != y:
        x, y = ball.parent[x], ball.parent[y]
    return int(x)


def distance(ball, x, y):
    """Number of edges between ``x`` and ``y``."""
    c = confluence(ball, x, y)
    return int(ball.depth[x] + ball.depth[y] - 2 * ball.depth[c])


def geodesic(ball, x, y):
    """Vertices of the geodesic from ``x`` to ``y``, both ends included."""
    c = confluence(ball, x, y)
    up = [x]
    while up[-1] != c:
        up.append(int(ball.parent[up[-1]]))
    down = [y]
    while down[-1] != c:
        down.append(int(ball.parent[down[-1]]))
    return [int(v) for v in up] + [int(v) for v in reversed(down[:-1])]
