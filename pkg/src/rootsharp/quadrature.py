"""Gauss-Jacobi rules and the 1-D integration contract used by the evaluators.

Rules are built by the Golub-Welsch method (eigenvalues of the Jacobi matrix),
polished with Newton steps on the three-term recurrence, and cached.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import lgamma, log
import threading

import numpy as np

from .errors import ConvergenceError, DomainError


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_dim: int = 24
    jacobi_exponents: tuple = (0.0, 0.0)
    rel_tol: float = 1e-8
    max_refinements: int = 4
    regime_threshold: float = 4.0

    def __post_init__(self):
        if self.nodes_per_dim < 2:
            raise DomainError("nodes_per_dim must be >= 2")
        if min(self.jacobi_exponents) <= -1:
            raise DomainError("Jacobi exponents must be > -1")
        if self.rel_tol <= 0:
            raise DomainError("rel_tol must be positive")
        if self.max_refinements < 0:
            raise DomainError("max_refinements must be >= 0")
        if self.regime_threshold <= 1:
            raise DomainError("regime_threshold must exceed 1")


@dataclass(frozen=True)
class Rule1D:
    """Gauss rule on (-1, 1) for the weight ``(1-x)**a * (1+x)**b``.

    ``one_minus`` and ``one_plus`` hold ``1 - x`` and ``1 + x``; ``log_weights``
    is ``log(weights)``.
    """
    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float
    one_minus: np.ndarray
    one_plus: np.ndarray
    log_weights: np.ndarray

    @property
    def m(self):
        return self.nodes.size


@dataclass(frozen=True)
class QuadResult:
    value: float
    converged: bool
    error: float
    nodes: int

    def __float__(self):
        return float(self.value)


def jacobi_moment(a, b):
    """Integral of ``(1-x)**a (1+x)**b`` over (-1, 1)."""
    return float(np.exp((a + b + 1) * log(2.0) + lgamma(a + 1) + lgamma(b + 1) - lgamma(a + b + 2)))


def _recurrence(m, a, b):
    """Diagonal and off-diagonal of the symmetric Jacobi matrix."""
    j = np.arange(m, dtype=float)
    ab = a + b
    diag = np.empty(m)
    denom = (2 * j + ab) * (2 * j + ab + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag[:] = (b * b - a * a) / denom
    if m:
        # the generic formula is 0/0 at j=0 when a+b=0
        diag[0] = (b - a) / (ab + 2)
    off = np.empty(max(m - 1, 0))
    if m > 1:
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
        jj = np.arange(2, m, dtype=float)
        off[1:] = (4 * jj * (jj + a) * (jj + b) * (jj + ab)
                   / ((2 * jj + ab) ** 2 * (2 * jj + ab + 1) * (2 * jj + ab - 1)))
    return diag, np.sqrt(off)


def _jacobi_p(m, a, b, x):
    """P_m and P_{m-1} in the standard normalization (P_n(1) = binom(n+a, n))."""
    p_prev = np.ones_like(x)
    if m == 0:
        return p_prev, np.zeros_like(x)
    p = 0.5 * (a - b) + 0.5 * (a + b + 2) * x
    for n in range(2, m + 1):
        c = 2 * n + a + b
        a1 = 2 * n * (n + a + b) * (c - 2)
        a2 = (c - 1) * (a * a - b * b)
        a3 = (c - 2) * (c - 1) * c
        a4 = 2 * (n + a - 1) * (n + b - 1) * c
        p, p_prev = ((a2 + a3 * x) * p - a4 * p_prev) / a1, p
    return p, p_prev


def _jacobi_dp(m, a, b, x, p, p_prev):
    c = 2 * m + a + b
    return (m * ((a - b) - c * x) * p + 2 * (m + a) * (m + b) * p_prev) / (c * (1 - x) * (1 + x))


@lru_cache(maxsize=512)
def _rule_cached(m, a, b):
    diag, off = _recurrence(m, a, b)
    jac = np.diag(diag)
    if m > 1:
        jac += np.diag(off, 1) + np.diag(off, -1)
    try:
        x, vec = np.linalg.eigh(jac)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceError(f"Golub-Welsch eigen-solve failed for m={m}, a={a}, b={b}") from exc
    w_gw = jacobi_moment(a, b) * vec[0, :] ** 2
    # Newton polish of the nodes, weights from the derivative formula
    for _ in range(2):
        p, pm = _jacobi_p(m, a, b, x)
        dp = _jacobi_dp(m, a, b, x, p, pm)
        x = np.clip(x - p / dp, -1.0 + 1e-300, 1.0 - 1e-300)
    p, pm = _jacobi_p(m, a, b, x)
    dp = _jacobi_dp(m, a, b, x, p, pm)
    logc = (lgamma(m + a + 1) + lgamma(m + b + 1) - lgamma(m + a + b + 1) - lgamma(m + 1)
            + (a + b + 1) * log(2.0))
    one_minus = 1.0 - x
    one_plus = 1.0 + x
    w = np.exp(logc - np.log(one_minus) - np.log(one_plus) - 2 * np.log(np.abs(dp)))
    if not np.all(np.isfinite(w)) or abs(w.sum() / w_gw.sum() - 1) > 1e-10:
        w = w_gw
    order = np.argsort(x)
    x, w = x[order], w[order]
    one_minus, one_plus = one_minus[order], one_plus[order]
    arrays = [x, w, one_minus, one_plus, np.log(w)]
    for arr in arrays:
        arr.setflags(write=False)
    return Rule1D(x, w, a, b, one_minus, one_plus, arrays[-1])


_rule_lock = threading.Lock()


def gauss_jacobi_rule(m, a_exp=0.0, b_exp=0.0):
    """m-point Gauss rule for ``(1-x)**a_exp (1+x)**b_exp`` on (-1, 1).

    Exact for polynomials of degree <= 2m-1.  Rules are cached by
    ``(m, a_exp, b_exp)`` and returned read-only.
    """
    m = int(m)
    if m < 1:
        raise DomainError("rule size must be >= 1")
    if a_exp <= -1 or b_exp <= -1:
        raise DomainError("Jacobi exponents must be > -1")
    key = (m, float(a_exp), float(b_exp))
    with _rule_lock:
        return _rule_cached(*key)


def integrate_1d(f, lo, hi, left_exp=0.0, right_exp=0.0, spec=None):
    """Integrate ``f(u) (u-lo)**left_exp (hi-u)**right_exp`` over ``[lo, hi]``.

    ``f`` is the smooth part and must accept a numpy array.  The node count
    starts at ``spec.nodes_per_dim`` and doubles up to ``spec.max_refinements``
    times until two successive estimates agree to ``spec.rel_tol``.  The
    returned ``QuadResult`` carries ``converged=False`` when that never happens.
    """
    spec = spec or QuadratureSpec()
    if not hi > lo:
        raise DomainError("integrate_1d needs lo < hi")
    half = 0.5 * (hi - lo)
    scale = half ** (1.0 + left_exp + right_exp)
    m = spec.nodes_per_dim
    prev = None
    value = err = np.nan
    for _ in range(spec.max_refinements + 1):
        rule = gauss_jacobi_rule(m, right_exp, left_exp)
        u = lo + half * rule.one_plus
        value = scale * float(np.dot(rule.weights, f(u)))
        if prev is not None:
            err = abs(value - prev)
            if err <= spec.rel_tol * abs(value):
                return QuadResult(value, True, err, m)
        prev = value
        m *= 2
    return QuadResult(value, False, err, m // 2)


def trunc_level(m):
    """Exponential truncation depth matched to an m-point rule."""
    return min(40.0, 1.9 * m)


# Integrands of the A_n recursion carry factors like (1 - exp(-2d))^p at both
# ends of long intervals.  On such intervals nodes are placed in
# tau = log(1 + d / LOG_MAP_SCALE), measured from the nearer end.
LOG_MAP_SCALE = 0.5
SHORT_PANEL = 2.0


def half_count(m):
    return max(2, m // 2)


def log_mapped_panel(extent, e, m, scale=LOG_MAP_SCALE):
    """Nodes for ``d`` in ``[0, extent]`` with ``d**e`` behaviour at ``d = 0``.

    Returns ``(d, log_w)``; the weights multiply the full integrand.
    """
    T = np.log1p(extent / scale)
    rule = gauss_jacobi_rule(m, 0.0, e)
    d = scale * np.expm1(0.5 * T * rule.one_plus)
    logw = rule.log_weights + log(0.5 * T) + np.log(scale + d) - e * np.log(rule.one_plus)
    return d, logw


def exp_graded_rule(length, rate, e_lo, e_hi, m, level=None):
    """Nodes for ``y`` in ``[lo, lo+length]`` when the integrand behaves like
    ``exp(rate*y)`` times algebraic factors with powers ``e_lo``, ``e_hi`` at the
    two ends.

    Returns ``(d_lo, d_hi, log_w)``: distances of each node to both ends
    (computed without cancellation) and log effective weights that multiply the
    *full* integrand, endpoint powers included.  Short intervals get one
    Gauss-Jacobi panel.  Longer ones are split in two log-mapped halves, or cut
    to ``level/|rate|`` next to the peak end when the exponential makes the far
    part negligible.  At most ``m`` nodes are used.
    """
    level = trunc_level(m) if level is None else level
    sig = abs(rate) * length
    if sig > level:
        d, logw = log_mapped_panel(level / abs(rate), e_hi if rate > 0 else e_lo, m)
        if rate > 0:
            return length - d, d, logw
        return d, length - d, logw
    if length <= SHORT_PANEL:
        rule = gauss_jacobi_rule(m, e_hi, e_lo)
        half = 0.5 * length
        logw = (rule.log_weights + log(half) - e_hi * np.log(rule.one_minus)
                - e_lo * np.log(rule.one_plus))
        return half * rule.one_plus, half * rule.one_minus, logw
    h = half_count(m)
    d1, w1 = log_mapped_panel(0.5 * length, e_lo, h)
    d2, w2 = log_mapped_panel(0.5 * length, e_hi, h)
    return (np.concatenate([d1, length - d2]), np.concatenate([length - d1, d2]),
            np.concatenate([w1, w2]))
