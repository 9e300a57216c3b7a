"""Spectral interval, c-function and Plancherel quadrature.

The spectral variable ``s`` ranges over ``[0, tau]`` with ``tau = pi / ln q``.
The Plancherel measure is ``2 c_P |c(s)|^-2 ds`` with
``c_P = q ln q / (4 pi (q+1))``.  The factor 2 folds the full period
``[0, 2 tau]`` of the exponentials ``q^(i s h)`` onto ``[0, tau]``: ``|c|^-2`` is
``tau``-periodic, and pairs of vertices with odd height difference already
integrate to zero over the boundary.  With this normalization the measure
has unit mass and the inversion formula reproduces ``f`` exactly.
"""
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PoleError",
    "SpectralGrid",
    "spectral_period",
    "plancherel_constant",
    "c_function",
    "plancherel_density",
    "build_grid",
    "total_mass",
    "DEFAULT_NODES",
]

DEFAULT_NODES = 256

# fold of the period [0, 2 tau] onto [0, tau]
_FOLD = 2.0


class PoleError(ZeroDivisionError):
    """The c-function was evaluated at one of its poles ``tau * Z``."""


def spectral_period(q):
    """``tau = pi / ln q``."""
    return np.pi / np.log(q)


def plancherel_constant(q):
    """``c_P = q ln q / (4 pi (q + 1))``."""
    return q * np.log(q) / (4 * np.pi * (q + 1))


def c_function(q, z):
    r"""Harish-Chandra type c-function of the tree.

    .. math::
        c(z) = \frac{q^{1/2}}{q+1}
               \frac{q^{1/2+iz} - q^{-1/2-iz}}{q^{iz} - q^{-iz}}

    Parameters
    ----------
    q : int
    z : complex or array_like of complex

    Raises
    ------
    PoleError
        If ``q^{iz} - q^{-iz}`` vanishes to machine precision.
    """
    z = np.asarray(z, dtype=complex)
    lq = np.log(q)
    a = np.exp(1j * z * lq)
    den = a - 1 / a
    if np.any(np.abs(den) <= 8 * np.finfo(float).eps * np.maximum(np.abs(a), 1)):
        raise PoleError("c-function evaluated at a pole (z in tau * Z)")
    num = np.sqrt(q) * a - 1 / (np.sqrt(q) * a)
    out = np.sqrt(q) / (q + 1) * num / den
    return out[()] if out.ndim == 0 else out


def plancherel_density(q, s):
    """Density of the (unit mass) Plancherel measure at ``s`` in ``(0, tau)``.

    Vanishes quadratically at both endpoints; the endpoints themselves are
    rejected because ``c`` has poles there.
    """
    s = np.asarray(s, dtype=float)
    tau = spectral_period(q)
    if np.any((s <= 0) | (s >= tau)):
        raise ValueError(f"s must lie strictly inside (0, {tau})")
    out = _FOLD * plancherel_constant(q) / np.abs(c_function(q, s)) ** 2
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Gauss-Legendre nodes on ``(0, tau)`` with Plancherel weights.

    Attributes
    ----------
    q : int
    tau : float
    nodes : ndarray, shape (M,)
        Increasing, strictly interior nodes.
    base_weights : ndarray, shape (M,)
        Gauss-Legendre weights for ``ds`` on ``[0, tau]``.
    weights : ndarray, shape (M,)
        ``base_weights * plancherel_density(nodes)``.
    """

    q: int
    tau: float
    nodes: np.ndarray
    base_weights: np.ndarray
    weights: np.ndarray

    @property
    def M(self):
        return len(self.nodes)

    def __len__(self):
        return len(self.nodes)


def build_grid(q, M=DEFAULT_NODES):
    """Gauss-Legendre rule with ``M`` nodes for the Plancherel measure of degree ``q``."""
    if int(q) != q or q < 2:
        raise ValueError(f"q must be an integer >= 2, got {q!r}")
    if int(M) != M or M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M!r}")
    tau = spectral_period(q)
    x, w = np.polynomial.legendre.leggauss(int(M))
    nodes = (x + 1) * (tau / 2)
    base = w * (tau / 2)
    weights = base * plancherel_density(q, nodes)
    for a in (nodes, base, weights):
        a.flags.writeable = False
    return SpectralGrid(int(q), tau, nodes, base, weights)


def total_mass(grid):
    """Quadrature value of the Plancherel mass; 1 up to quadrature error."""
    return float(grid.weights.sum())
