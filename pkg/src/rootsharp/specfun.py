"""Scalar special functions: log-gamma, real 2F1 on z <= 0, incomplete gamma
and the weighted exponential integral used in the lemma checks."""
import enum
import math

import numpy as np

from .errors import ConvergenceError, DegenerateParameterError, DomainError
from .quadrature import QuadratureSpec, integrate_1d

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

SERIES_TAIL = 1e-14
SERIES_MAX_TERMS = 100000
DEGENERACY_EPS = 1e-8


def _lanczos_log(x):
    # log Gamma(x) for x >= 0.5
    x -= 1.0
    s = _LANCZOS[0]
    for i in range(1, 9):
        s += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(s)


def _sinpi(x):
    # sin(pi x) with the argument reduced first
    r = x - 2.0 * round(0.5 * x)
    return math.sin(math.pi * r)


def log_gamma_sign(x):
    """``(log|Gamma(x)|, sign Gamma(x))`` for any real x; poles give ``(inf, 0)``."""
    x = float(x)
    if x >= 0.5:
        return _lanczos_log(x), 1
    if x == math.floor(x):
        return math.inf, 0
    s = _sinpi(x)
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    val = _LOG_PI - math.log(abs(s)) - _lanczos_log(1.0 - x)
    return val, (1 if s > 0 else -1)


def log_gamma(x):
    """Natural log of Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    if x == 1.0 or x == 2.0:
        return 0.0
    return log_gamma_sign(x)[0]


def log_rgamma(x):
    """``(log|1/Gamma(x)|, sign)``; the sign is 0 at the poles of Gamma."""
    val, sgn = log_gamma_sign(x)
    if sgn == 0:
        return -math.inf, 0
    return -val, sgn


class HypRegime(enum.Enum):
    SERIES_PFAFF = "series_pfaff"
    CONNECTION_LARGE_Z = "connection_large_z"


def select_regime(z, threshold=4.0):
    if threshold <= 1:
        raise DomainError("regime threshold must exceed 1")
    return HypRegime.SERIES_PFAFF if abs(z) < threshold else HypRegime.CONNECTION_LARGE_Z


def _log_series(a, b, c, w):
    """Signed log of sum_n (a)_n (b)_n / ((c)_n n!) w^n for 0 <= w < 1."""
    if w == 0.0 or a == 0.0 or b == 0.0:
        return 0.0, 1
    s = 1.0
    t = 1.0
    log_scale = 0.0
    for n in range(SERIES_MAX_TERMS):
        r = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w
        t *= r
        s += t
        if t == 0.0:
            break
        if abs(s) > 1e200:
            s *= 1e-200
            t *= 1e-200
            log_scale += 200.0 * math.log(10.0)
        # tail of a geometric majorant once the ratio is below one
        rn = abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2.0)) * w)
        if rn < 1.0 and n + 1 > abs(a) + abs(b) and abs(t) * rn / (1.0 - rn) <= SERIES_TAIL * abs(s):
            break
    else:
        raise ConvergenceError(
            f"2F1 series did not converge in {SERIES_MAX_TERMS} terms (a={a}, b={b}, c={c}, w={w})")
    if s == 0.0:
        return -math.inf, 0
    return math.log(abs(s)) + log_scale, (1 if s > 0 else -1)


def _log_pfaff(a, b, c, z):
    # F(a,b;c;z) = (1-z)^-a F(a, c-b; c; z/(z-1)),  z <= 0
    mz = -z
    w = mz / (1.0 + mz)
    lf, sf = _log_series(a, c - b, c, w)
    return lf - a * math.log1p(mz), sf


def _check_params(a, b, c, z):
    if z > 0:
        raise DomainError(f"2F1 is implemented for z <= 0 only, got z={z}")
    if c <= 0 and c == math.floor(c):
        raise DomainError(f"c must not be a non-positive integer, got c={c}")


def log_gauss_2f1(a, b, c, z, regime=None, threshold=4.0):
    """Signed log ``(log|F|, sign)`` of 2F1(a, b; c; z) for real parameters and z <= 0.

    ``regime`` forces a route; by default it is picked from ``|z|`` against
    ``threshold``.  The large-|z| route raises DegenerateParameterError when
    ``b - a`` is (numerically) an integer.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    _check_params(a, b, c, z)
    if a == 0.0 or b == 0.0 or z == 0.0:
        return 0.0, 1
    if regime is None:
        regime = select_regime(z, threshold)
    if regime is HypRegime.SERIES_PFAFF:
        return _log_pfaff(a, b, c, z)
    return _log_connection(a, b, c, z)


def _log_connection(a, b, c, z):
    s = _sinpi(b - a)
    if abs(s) < DEGENERACY_EPS:
        raise DegenerateParameterError(
            f"integer-degenerate spectral parameter (b-a={b - a}) in the large-|z| 2F1 formula")
    log_mz = math.log(-z)
    zinv = 1.0 / z
    lg_c, sg_c = log_gamma_sign(c)
    terms = []
    for p, q, sign in ((a, b, 1), (b, a, -1)):
        # (-z)^-p / (Gamma(q) Gamma(c-p) Gamma(p-q+1)) F(p, p-c+1; p-q+1; 1/z)
        parts = [log_rgamma(q), log_rgamma(c - p), log_rgamma(p - q + 1.0)]
        sg = sign * sg_c * (1 if s > 0 else -1)
        lv = lg_c + _LOG_PI - math.log(abs(s)) - p * log_mz
        for lv_i, sg_i in parts:
            sg *= sg_i
            lv += lv_i
        if sg == 0:
            continue
        lf, sf = _log_pfaff(p, p - c + 1.0, p - q + 1.0, zinv)
        if sf == 0:
            continue
        terms.append((lv + lf, sg * sf))
    return _signed_lse(terms)


def _signed_lse(terms):
    if not terms:
        return -math.inf, 0
    m = max(t[0] for t in terms)
    if m == -math.inf:
        return -math.inf, 0
    acc = sum(sg * math.exp(lv - m) for lv, sg in terms)
    if acc == 0.0:
        return -math.inf, 0
    return m + math.log(abs(acc)), (1 if acc > 0 else -1)


def gauss_2f1(a, b, c, z, regime=None, threshold=4.0):
    """2F1(a, b; c; z) for real parameters, c > 0 (or non-integer) and z <= 0."""
    lv, sg = log_gauss_2f1(a, b, c, z, regime, threshold)
    if sg == 0:
        return 0.0
    return sg * math.exp(lv)


def lower_gamma(k, x):
    """Lower incomplete gamma ``int_0^x u^(k-1) e^-u du``."""
    k, x = float(k), float(x)
    if not k > 0 or x < 0:
        raise DomainError("lower_gamma needs k > 0 and x >= 0")
    if x == 0.0:
        return 0.0
    lg = log_gamma(k)
    if x < k + 1.0:
        term = 1.0 / k
        s = term
        ap = k
        for _ in range(10000):
            ap += 1.0
            term *= x / ap
            s += term
            if abs(term) < abs(s) * 1e-16:
                break
        else:  # pragma: no cover
            raise ConvergenceError("lower_gamma series did not converge")
        return math.exp(k * math.log(x) - x + math.log(s))
    # modified Lentz for the upper function
    tiny = 1e-300
    bb = x + 1.0 - k
    cc = 1.0 / tiny
    d = 1.0 / bb
    h = d
    for i in range(1, 10000):
        an = -i * (i - k)
        bb += 2.0
        d = an * d + bb
        if abs(d) < tiny:
            d = tiny
        cc = bb + an / cc
        if abs(cc) < tiny:
            cc = tiny
        d = 1.0 / d
        delta = d * cc
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:  # pragma: no cover
        raise ConvergenceError("lower_gamma continued fraction did not converge")
    upper = math.exp(k * math.log(x) - x + math.log(h))
    return math.exp(lg) - upper


def lemma_b_integral(a, x, k, level=40.0):
    """``int_0^x e^(-a u) (u/(1+u))^(k-1) du`` by panelled Gauss-Jacobi.

    The first panel carries the ``u^(k-1)`` endpoint weight; the rest double in
    length and stop where ``a u`` exceeds ``level``.
    """
    a, x, k = float(a), float(x), float(k)
    if a < 0 or x < 0 or not k > 0:
        raise DomainError("lemma_b_integral needs a >= 0, x >= 0, k > 0")
    if x == 0.0:
        return 0.0
    qs = QuadratureSpec(nodes_per_dim=16, rel_tol=1e-13, max_refinements=3)
    cap = 8.0 / a if a > 0 else math.inf
    end = min(x, level / a) if a > 0 else x
    h = min(end, 1.0, cap)

    def head(u):
        return np.exp(-a * u - (k - 1.0) * np.log1p(u))

    def body(u):
        return np.exp(-a * u + (k - 1.0) * (np.log(u) - np.log1p(u)))

    total = integrate_1d(head, 0.0, h, k - 1.0, 0.0, qs).value
    lo = h
    while lo < end:
        hi = min(end, lo + min(lo, cap))
        total += integrate_1d(body, lo, hi, 0.0, 0.0, qs).value
        lo = hi
    return total
