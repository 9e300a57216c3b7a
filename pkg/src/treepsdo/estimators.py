"""scikit-learn style wrappers around the transform and operator calculus.

Samples are rows: a tree function on a ball with ``N`` vertices is a row of
length ``N`` in canonical vertex order, and a spectral function is flattened
cylinder-major to a row of length ``C * M``.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import psdo
from ._validation import check_complex_array, check_n_features, check_positive_int
from .boundary import build_partition
from .spectral import DEFAULT_NODES, build_grid
from .transform import fh_forward, fh_inverse, plancherel_pairing
from .tree import build_ball

__all__ = ["FourierHelgasonTransform", "PseudoDifferentialOperator"]


class _TreeGeometry(BaseEstimator):
    """Builds the ball, cylinder partition and spectral grid on ``fit``."""

    def __init__(self, q=2, radius=4, n_nodes=DEFAULT_NODES):
        self.q = q
        self.radius = radius
        self.n_nodes = n_nodes

    def _fit_geometry(self):
        q = check_positive_int(self.q, "q", minimum=2)
        R = check_positive_int(self.radius, "radius", minimum=1)
        M = check_positive_int(self.n_nodes, "n_nodes", minimum=2)
        self.ball_ = build_ball(q, R)
        self.partition_ = build_partition(self.ball_, R)
        self.grid_ = build_grid(q, M)
        self.n_vertices_ = self.ball_.n_vertices
        self.n_cylinders_ = self.partition_.n_cylinders
        return self


class FourierHelgasonTransform(TransformerMixin, _TreeGeometry):
    """Fourier-Helgason transform of functions on a ball of the tree.

    Parameters
    ----------
    q : int, default=2
        Each vertex has ``q + 1`` neighbours.
    radius : int, default=4
        Ball radius; cylinders sit at the same depth.
    n_nodes : int, default=256
        Gauss-Legendre nodes on the spectral interval.

    Attributes
    ----------
    ball_, partition_, grid_ : geometry built by ``fit``.
    n_features_in_ : int
        Number of ball vertices.

    Examples
    --------
    >>> import numpy as np
    >>> fh = FourierHelgasonTransform(q=2, radius=2, n_nodes=64).fit()
    >>> f = np.arange(fh.n_features_in_, dtype=float)[None, :]
    >>> np.allclose(fh.inverse_transform(fh.transform(f)).real, f)
    True
    """

    def fit(self, X=None, y=None):
        self._fit_geometry()
        self.n_features_in_ = self.n_vertices_
        if X is not None:
            check_n_features(check_complex_array(X), self.n_vertices_, "vertex values")
        return self

    def transform(self, X):
        """Rows of vertex values to flattened spectral rows of length ``C * M``."""
        check_is_fitted(self, "grid_")
        X = check_complex_array(X)
        check_n_features(X, self.n_vertices_, "vertex values")
        F = fh_forward(X, self.partition_, self.grid_)
        return F.reshape(X.shape[0], -1)

    def inverse_transform(self, X):
        check_is_fitted(self, "grid_")
        F = self._unflatten(X)
        return fh_inverse(F, self.partition_, self.grid_)

    def pairing(self, A, B):
        """Plancherel inner product of two batches of flattened spectral rows."""
        check_is_fitted(self, "grid_")
        return plancherel_pairing(self._unflatten(A), self._unflatten(B),
                                  self.partition_, self.grid_)

    def _unflatten(self, X):
        X = check_complex_array(X)
        C, M = self.n_cylinders_, self.grid_.M
        check_n_features(X, C * M, "spectral values")
        return X.reshape(X.shape[0], C, M)


class PseudoDifferentialOperator(TransformerMixin, _TreeGeometry):
    """Operator ``T_sigma`` given by a symbol on a ball of the tree.

    Parameters
    ----------
    symbol : NuclearDecomposition or array of shape (N, C, M)
        A decomposition ``K = sum_k f_k g_k^T`` or a grid symbol.
    q, radius, n_nodes : see :class:`FourierHelgasonTransform`.

    Attributes
    ----------
    symbol_ : ndarray of shape (N, C, M)
    kernel_ : ndarray of shape (N, N)
        ``(T f)(x) = sum_y kernel_[x, y] f(y)``.
    """

    def __init__(self, symbol=None, q=2, radius=4, n_nodes=DEFAULT_NODES):
        super().__init__(q=q, radius=radius, n_nodes=n_nodes)
        self.symbol = symbol

    def fit(self, X=None, y=None):
        self._fit_geometry()
        self.n_features_in_ = self.n_vertices_
        if self.symbol is None:
            raise ValueError("symbol is required")
        if isinstance(self.symbol, psdo.NuclearDecomposition):
            if self.symbol.n_vertices != self.n_vertices_:
                raise ValueError(f"decomposition lives on {self.symbol.n_vertices} vertices, "
                                 f"the ball has {self.n_vertices_}")
            sigma = self.symbol
        else:
            sigma = check_complex_array(self.symbol, "symbol", ndim=3)
            expected = (self.n_vertices_, self.n_cylinders_, self.grid_.M)
            if sigma.shape != expected:
                raise ValueError(f"symbol must have shape {expected}, got {sigma.shape}")
        self.symbol_ = psdo.as_grid_symbol(sigma, self.partition_, self.grid_)
        self.kernel_ = psdo.kernel_from_symbol(self.symbol_, self.partition_, self.grid_)
        return self

    def transform(self, X):
        """Apply the operator to each row."""
        check_is_fitted(self, "kernel_")
        X = check_complex_array(X)
        check_n_features(X, self.n_vertices_, "vertex values")
        return X @ self.kernel_.T

    def _with_symbol(self, sigma):
        return PseudoDifferentialOperator(sigma, self.q, self.radius, self.n_nodes).fit()

    def adjoint(self):
        """Fitted operator for ``T_sigma^*``."""
        check_is_fitted(self, "symbol_")
        if isinstance(self.symbol, psdo.NuclearDecomposition):
            sigma = psdo.adjoint_symbol(self.symbol, self.partition_, self.grid_)
        else:
            sigma = psdo.adjoint_symbol_direct(self.symbol_, self.partition_, self.grid_)
        return self._with_symbol(sigma)

    def compose(self, other):
        """Fitted operator for ``T_self T_other``; ``self`` must carry a decomposition."""
        check_is_fitted(self, "symbol_")
        check_is_fitted(other, "symbol_")
        if not isinstance(self.symbol, psdo.NuclearDecomposition):
            raise TypeError("the left factor needs a nuclear decomposition")
        if other.symbol_.shape != self.symbol_.shape:
            raise ValueError("operators live on different grids")
        lam = psdo.product_symbol(self.symbol, other.symbol_, self.partition_, self.grid_)
        return self._with_symbol(lam)

    def report(self, schatten_exponents=(1, 2), seed=0):
        check_is_fitted(self, "symbol_")
        return psdo.operator_report(self.symbol_, self.partition_, self.grid_,
                                    schatten_exponents=schatten_exponents, seed=seed)
