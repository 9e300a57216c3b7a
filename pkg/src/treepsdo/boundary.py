"""Depth-D discretization of the tree boundary.

The boundary is cut into the cylinder sets ``E(y)`` of rays through the
vertices ``y`` at depth ``D``.  Every quantity built from heights of vertices
of depth at most ``D`` is constant on these cylinders, so integrals over the
boundary of such quantities are finite sums and carry no discretization error.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

__all__ = [
    "TruncationError",
    "CylinderPartition",
    "build_partition",
    "height",
    "height_rel",
    "radon_nikodym",
    "level_set_measure",
    "confluence_level_mass",
    "averaging",
    "boundary_integral",
]


class TruncationError(ValueError):
    """The cylinder depth is too shallow for the requested vertex."""


@dataclass(frozen=True, eq=False)
class CylinderPartition:
    """Cylinder sets of depth ``D`` with their (equal) boundary measures.

    Attributes
    ----------
    ball : TreeBall
    D : int
        Cylinder depth; ``1 <= D <= ball.R``.
    cylinders : ndarray of int
        The depth-``D`` vertices representing each cylinder, in canonical order.
    weight : Fraction
        Exact measure ``1 / ((q+1) q^(D-1))`` of a single cylinder.
    """

    ball: object
    D: int
    cylinders: np.ndarray
    weight: Fraction

    @property
    def q(self):
        return self.ball.q

    @property
    def n_cylinders(self):
        return len(self.cylinders)

    def __len__(self):
        return len(self.cylinders)

    @property
    def weights(self):
        return np.full(self.n_cylinders, float(self.weight))

    @property
    def exact_weights(self):
        return [self.weight] * self.n_cylinders

    @cached_property
    def heights(self):
        """Integer heights ``h[x, c]`` for every ball vertex and cylinder.

        Requires ``D >= R``; shallower partitions only resolve the heights of
        vertices of depth at most ``D`` (see :func:`height`).
        """
        if self.D < self.ball.R:
            raise TruncationError(
                f"cylinder depth D={self.D} is below the ball radius R={self.ball.R}")
        A = self.ball.ancestors[:, 1:]
        Y = A[self.cylinders]
        same = (A[:, None, :] == Y[None, :, :]) & (A[:, None, :] >= 0)
        h = 2 * same.sum(axis=2) - self.ball.depth[:, None]
        h.flags.writeable = False
        return h

    def ancestor_groups(self, n):
        """Label of the depth-``n`` ancestor of each cylinder."""
        return self.ball.ancestors[self.cylinders, n]


def build_partition(ball, D=None):
    """Cylinder partition of depth ``D`` (default: the ball radius)."""
    D = ball.R if D is None else D
    if int(D) != D or D < 1:
        raise ValueError(f"cylinder depth must be an integer >= 1, got {D!r}")
    if D > ball.R:
        raise ValueError(f"cylinder depth D={D} exceeds the ball radius R={ball.R}")
    D = int(D)
    cylinders = ball.sphere(D)
    cylinders.flags.writeable = False
    weight = Fraction(1, (ball.q + 1) * ball.q ** (D - 1))
    return CylinderPartition(ball, D, cylinders, weight)


def _check_resolved(part, x):
    part.ball._check_vertex(x)
    if part.ball.depth[x] > part.D:
        raise TruncationError(
            f"vertex {x} has depth {part.ball.depth[x]} > cylinder depth {part.D}")


def height(ball, part, x, c):
    """Height ``2|c(x, w)| - |x|`` of vertex ``x`` for any ray ``w`` in cylinder ``c``."""
    _check_resolved(part, x)
    A = ball.ancestors
    y = part.cylinders[c]
    dx = int(ball.depth[x])
    conf = int(np.count_nonzero(A[x, 1:dx + 1] == A[y, 1:dx + 1]))
    return 2 * conf - dx


def height_rel(ball, part, x, x0, c):
    """Height of ``x`` seen from the reference point ``x0``."""
    return height(ball, part, x, c) - height(ball, part, x0, c)


def radon_nikodym(ball, part, x, y, c):
    """Exact derivative ``d nu_y / d nu_x`` on cylinder ``c``, namely ``q^(h(y) - h(x))``."""
    return Fraction(ball.q) ** height_rel(ball, part, y, x, c)


def level_set_measure(q, j):
    """The value ``q / ((q+1) q^j)``.

    For ``1 <= j <= |x|`` this is the measure of the rays through the depth-``j``
    ancestor of ``x``, i.e. ``nu{w : |c(x, w)| >= j}``.  It equals
    ``nu{w : |c(x, w)| = j}`` only at ``j = 0`` and ``j = |x|``; see
    :func:`confluence_level_mass` for the exact level masses.
    """
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    return Fraction(q, (q + 1) * q**j)


def confluence_level_mass(q, j, n):
    """Exact ``nu{w : |c(x, w)| = j}`` for a vertex ``x`` at depth ``n``.

    ``q/(q+1)`` at ``j = 0``, ``(q-1)/((q+1) q^j)`` for ``0 < j < n`` and
    ``1/((q+1) q^(n-1))`` at ``j = n >= 1``.  The masses over ``j = 0..n`` sum to 1.

    Examples
    --------
    >>> sum(confluence_level_mass(2, j, 3) for j in range(4))
    Fraction(1, 1)
    """
    if not 0 <= j <= n:
        raise ValueError(f"need 0 <= j <= n, got j={j}, n={n}")
    if n == 0:
        return Fraction(1)
    if j == 0:
        return Fraction(q, q + 1)
    if j == n:
        return Fraction(1, (q + 1) * q ** (n - 1))
    return Fraction(q - 1, (q + 1) * q**j)


def averaging(part, F, n):
    """Conditional expectation of ``F`` onto the depth-``n`` cylinders.

    ``F`` is indexed by cylinder along its first axis; any trailing axes
    (e.g. spectral nodes) are averaged independently.
    """
    if not 0 <= n <= part.D:
        raise ValueError(f"averaging depth must lie in [0, {part.D}], got {n}")
    F = np.asarray(F)
    if F.shape[0] != part.n_cylinders:
        raise ValueError(f"expected {part.n_cylinders} cylinders, got {F.shape[0]}")
    labels = part.ancestor_groups(n)
    _, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    sums = np.zeros((len(counts),) + F.shape[1:], dtype=np.result_type(F, float))
    np.add.at(sums, inverse, F)
    # cylinders have equal weights, so the nu-average is the plain mean
    means = sums / counts.reshape((-1,) + (1,) * (F.ndim - 1))
    return means[inverse]


def boundary_integral(part, F):
    """``sum_c nu(E_c) F(c)``, reducing the first axis of ``F``."""
    F = np.asarray(F)
    if F.shape[0] != part.n_cylinders:
        raise ValueError(f"expected {part.n_cylinders} cylinders, got {F.shape[0]}")
    return float(part.weight) * F.sum(axis=0)
