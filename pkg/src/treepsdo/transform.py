"""Fourier-Helgason transform on a ball, its inverse and the Plancherel pairing.

Tree functions are complex arrays of shape ``(n_vertices,)``; spectral
functions are complex arrays of shape ``(n_cylinders, M)``.  Leading batch
axes are allowed on both.
"""
from functools import lru_cache

import numpy as np

__all__ = [
    "Exponentials",
    "exponentials",
    "fh_forward",
    "fh_inverse",
    "plancherel_pairing",
]


class Exponentials:
    """Tables ``q^((1/2 + i s_m) h[x, c])`` and ``q^((1/2 - i s_m) h[x, c])``.

    Both have shape ``(n_vertices, n_cylinders, M)``.  ``measure`` holds the
    product weights ``nu_c * w_m`` of shape ``(n_cylinders, M)``.
    """

    def __init__(self, part, grid):
        if part.q != grid.q:
            raise ValueError(f"partition has q={part.q} but grid has q={grid.q}")
        h = part.heights
        lq = np.log(part.q)
        R = part.ball.R
        levels = np.arange(-R, R + 1)
        # one small table per height level, gathered by the integer heights
        plus = np.exp(np.outer(levels, (0.5 + 1j * grid.nodes) * lq))
        self.part = part
        self.grid = grid
        self.plus = plus[h + R]
        self.minus = np.conj(self.plus)
        self.modulus = np.exp(0.5 * lq * h)
        self.measure = np.outer(part.weights, grid.weights)
        for a in (self.plus, self.minus, self.modulus, self.measure):
            a.flags.writeable = False

    @property
    def shape(self):
        return self.plus.shape


@lru_cache(maxsize=16)
def exponentials(part, grid):
    """Cached :class:`Exponentials` for a partition/grid pair."""
    return Exponentials(part, grid)


def _check_tree(f, part):
    f = np.asarray(f)
    n = part.ball.n_vertices
    if f.shape[-1:] != (n,):
        raise ValueError(f"tree function must have trailing size {n}, got shape {f.shape}")
    return f


def _check_spectral(F, part, grid):
    F = np.asarray(F)
    shape = (part.n_cylinders, grid.M)
    if F.shape[-2:] != shape:
        raise ValueError(f"spectral function must have trailing shape {shape}, got {F.shape}")
    return F


def fh_forward(f, part, grid):
    """Fourier-Helgason transform ``Hf(c, s_m) = sum_y f(y) q^((1/2 + i s_m) h_c(y))``.

    Exact on the cylinder/node grid: no quadrature is involved.

    Parameters
    ----------
    f : array_like, shape (..., n_vertices)
    part : CylinderPartition
        Must resolve every vertex of the ball (``D >= R``).
    grid : SpectralGrid

    Returns
    -------
    ndarray, shape (..., n_cylinders, M)
    """
    f = _check_tree(f, part)
    E = exponentials(part, grid)
    return np.tensordot(f, E.plus, axes=([-1], [0]))


def fh_inverse(F, part, grid):
    """Inverse transform ``f(x) = int int q^((1/2 - i s) h(x)) F dnu dmu``.

    The boundary integral is an exact cylinder sum; only the ``s`` integral
    is approximated (by the grid quadrature).
    """
    F = _check_spectral(F, part, grid)
    E = exponentials(part, grid)
    weighted = F * E.measure
    return np.tensordot(weighted, E.minus, axes=([-2, -1], [1, 2]))


def plancherel_pairing(F, G, part, grid):
    """``int int F conj(G) dnu dmu`` over the cylinder/node grid."""
    F = _check_spectral(F, part, grid)
    G = _check_spectral(G, part, grid)
    if F.shape != G.shape:
        raise ValueError(f"shape mismatch: {F.shape} vs {G.shape}")
    E = exponentials(part, grid)
    return np.sum(F * np.conj(G) * E.measure, axis=(-2, -1))
