"""Distribution functions, L^p / weak-L^p norms and weak-type checks.

All measures are counting measures on the vertices of a ball, so every
distribution function is an exact integer count.  Lebesgue exponents of the
weak type are called ``q_exp`` to keep them apart from the tree degree ``q``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.special import binom, zeta

__all__ = [
    "DistributionProfile",
    "WeakTypeReport",
    "KernelBoundReport",
    "lp_norm",
    "layercake_value",
    "layercake_residual",
    "weak_norm",
    "weak_constant",
    "strong_type_constant",
    "lr_series",
    "lr_embedding_constant",
    "strong_type_check",
    "lr_embedding_check",
    "kernel_lq_bound_check",
]


class DistributionProfile:
    """Distribution function ``m(lam) = #{x : |f(x)| > lam}`` of a finite function."""

    def __init__(self, f):
        self.values = np.sort(np.abs(np.asarray(f)).ravel())

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return len(self.values) - np.searchsorted(self.values, lam, side="right")

    @property
    def breakpoints(self):
        """Distinct nonzero values of ``|f|``, increasing."""
        return np.unique(self.values[self.values > 0])


def _check_p(p, name="p"):
    if not p >= 1:
        raise ValueError(f"{name} must be >= 1, got {p}")


def lp_norm(f, p):
    """``(sum |f|^p)^(1/p)`` over the vertices."""
    _check_p(p)
    return float(np.sum(np.abs(f) ** p) ** (1 / p))


def layercake_value(f, p):
    """``p int_0^inf lam^(p-1) m(lam) dlam`` integrated exactly.

    ``m`` is constant between consecutive breakpoints ``l_i < l_{i+1}``, where
    the integral is ``m_i (l_{i+1}^p - l_i^p)``.
    """
    _check_p(p)
    prof = DistributionProfile(f)
    knots = np.concatenate([[0.0], prof.breakpoints])
    counts = prof(knots[:-1])
    return float(np.sum(counts * np.diff(knots**p)))


def layercake_residual(f, p):
    return abs(lp_norm(f, p) ** p - layercake_value(f, p))


def weak_norm(f, q_exp):
    """``sup_lam lam m(lam)^(1/q_exp)``.

    With ``|f|`` sorted decreasingly as ``a_1 >= a_2 >= ...``, the supremum is
    ``max_k a_k k^(1/q_exp)`` (approached from below each breakpoint).
    """
    _check_p(q_exp, "q_exp")
    a = np.sort(np.abs(np.asarray(f)).ravel())[::-1]
    if a.size == 0:
        return 0.0
    k = np.arange(1, a.size + 1)
    return float(np.max(a * k ** (1 / q_exp)))


def _as_family(family):
    fam = np.atleast_2d(np.asarray(family))
    if fam.shape[0] == 0:
        raise ValueError("family must be non-empty")
    if not np.all(np.any(fam != 0, axis=1)):
        raise ValueError("family contains a zero function")
    return fam


def weak_constant(K, p, q_exp, family):
    """Smallest ``C`` with ``#{|Kf| > lam} <= (C ||f||_p / lam)^q_exp`` on the family."""
    _check_p(p)
    fam = _as_family(family)
    images = fam @ np.asarray(K).T
    return max(weak_norm(Tf, q_exp) / lp_norm(f, p) for f, Tf in zip(fam, images))


def strong_type_constant(C, p, q_exp):
    """``2^((p-q)/p) C (p/(p-q))^(1/p)``."""
    return 2 ** ((p - q_exp) / p) * C * (p / (p - q_exp)) ** (1 / p)


def lr_series(q_exp, r, tol=1e-16):
    """``sum_{k>=2} k^q_exp / (k-1)^r`` for ``r > q_exp + 1``.

    With ``j = k - 1`` the terms are ``(1 + 1/j)^q j^(q-r)``.  The ``j = 1`` term
    is ``2^q``; for ``j >= 2`` the binomial series of ``(1 + 1/j)^q`` converges
    and the sum becomes ``sum_i binom(q, i) (zeta(r - q + i) - 1)``, whose terms
    decay like ``2^-i``.
    """
    _check_p(q_exp, "q_exp")
    if not r > q_exp + 1:
        raise ValueError(f"series diverges unless r > q_exp + 1 (r={r}, q_exp={q_exp})")
    total = 2.0**q_exp
    i = 0
    while True:
        c = binom(q_exp, i)
        term = c * (zeta(r - q_exp + i) - 1)
        total += term
        # for i > q_exp + 1 the remainder is bounded by the last term
        if i > q_exp + 1 and abs(term) < tol * max(abs(total), 1):
            break
        if i > 2000:
            raise RuntimeError("series did not converge")
        i += 1
    return float(total)


def lr_embedding_constant(C, q_exp, r):
    """``C^(q/r) (sum_{k>=2} k^q/(k-1)^r + (2C)^r)^(1/r)``."""
    return C ** (q_exp / r) * (lr_series(q_exp, r) + (2 * C) ** r) ** (1 / r)


@dataclass
class WeakTypeReport:
    p: float
    q_exp: float
    r: float | None
    weak_constant: float
    bound: float
    ratios: np.ndarray
    passed: bool
    witness: int | None = None
    sup_image: float | None = None
    sup_bound_passed: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def worst_ratio(self):
        return float(self.ratios.max(initial=0.0))

    @property
    def margin(self):
        return self.bound - self.worst_ratio


def _report(p, q_exp, r, C, bound, ratios, slack):
    ok = ratios <= bound * (1 + slack) + slack
    witness = None if ok.all() else int(np.argmax(ratios - bound))
    return WeakTypeReport(p, q_exp, r, C, bound, ratios, bool(ok.all()), witness)


def strong_type_check(K, p, q_exp, family, slack=1e-12):
    """Check ``||Kf||_p <= 2^((p-q)/p) C (p/(p-q))^(1/p) ||f||_p`` on the family,
    with ``C`` the weak constant measured on the same family."""
    _check_p(q_exp, "q_exp")
    if not p > q_exp:
        raise ValueError(f"need p > q_exp, got p={p}, q_exp={q_exp}")
    fam = _as_family(family)
    C = weak_constant(K, p, q_exp, fam)
    images = fam @ np.asarray(K).T
    ratios = np.array([lp_norm(Tf, p) / lp_norm(f, p) for f, Tf in zip(fam, images)])
    return _report(p, q_exp, None, C, strong_type_constant(C, p, q_exp), ratios, slack)


def lr_embedding_check(K, p, q_exp, r, family, slack=1e-12, sup_slack=1e-9):
    """Check ``||Kf||_r <= C^(q/r) (sum_k k^q/(k-1)^r + (2C)^r)^(1/r)`` for
    ``||f||_p = 1``, together with the intermediate bound ``max |Kf| <= 2C``.

    Family members are normalized to unit ``L^p`` norm first.
    """
    _check_p(q_exp, "q_exp")
    if not r > q_exp + 1:
        raise ValueError(f"need r > q_exp + 1, got r={r}, q_exp={q_exp}")
    fam = _as_family(family)
    fam = fam / np.array([lp_norm(f, p) for f in fam])[:, None]
    C = weak_constant(K, p, q_exp, fam)
    images = fam @ np.asarray(K).T
    ratios = np.array([lp_norm(Tf, r) if r >= 1 else np.nan for Tf in images])
    rep = _report(p, q_exp, r, C, lr_embedding_constant(C, q_exp, r), ratios, slack)
    rep.sup_image = float(np.abs(images).max(initial=0.0))
    rep.sup_bound_passed = rep.sup_image <= 2 * C + sup_slack
    rep.extra["series"] = lr_series(q_exp, r)
    return rep


@dataclass
class KernelBoundReport:
    p: float
    q_conj: float
    bound: float
    ratios: np.ndarray
    passed: bool
    witness: int | None = None

    @property
    def worst_ratio(self):
        return float(self.ratios.max(initial=0.0))

    @property
    def margin(self):
        return self.bound - self.worst_ratio


def kernel_lq_bound_check(K, p, family, slack=1e-12):
    """Check ``||Kf||_q <= (sum_{x,y} |K[x,y]|^q)^(1/q) ||f||_p`` with ``1/p + 1/q = 1``."""
    if not p > 2:
        raise ValueError(f"need p > 2, got {p}")
    qc = p / (p - 1)
    K = np.asarray(K)
    bound = float(np.sum(np.abs(K) ** qc) ** (1 / qc))
    fam = _as_family(family)
    images = fam @ K.T
    ratios = np.array([lp_norm(Tf, qc) / lp_norm(f, p) for f, Tf in zip(fam, images)])
    ok = ratios <= bound * (1 + slack) + slack
    witness = None if ok.all() else int(np.argmax(ratios - bound))
    return KernelBoundReport(p, qc, bound, ratios, bool(ok.all()), witness)
