"""phi_lambda(e^X) for the root system A_n.

The main entry is ``log_phi_an``, which runs the interlacing recursion (see
``_an_kernels``).  The module also carries the reduced integral I^(n), its
truncation, and the k=1 closed forms used as oracles.
"""
from dataclasses import dataclass
import itertools
import math

import numpy as np

from ._accel import resolve_backend
from ._an_kernels import psi
from .errors import DegenerateParameterError, DepthError, DomainError, PreconditionError
from .quadrature import QuadratureSpec, exp_graded_rule
from .rootcore import RootSystemSpec, is_dominant, log_sinh, rho, root_values

MAX_DEPTH = 4
WALL_EPS = 1e-9
WALL_OFFSET = 1e-6
SMALL_PHASE = 1e-3


@dataclass(frozen=True)
class LogResult:
    """A natural-log value with its quadrature diagnostics."""
    value: float
    converged: bool = True
    error: float = 0.0
    regularized: bool = False
    nodes: int = 0

    def __float__(self):
        return float(self.value)


# (nodes_per_dim, rel_tol, max_refinements) keeping the n(n+1)/2-dimensional
# tensor grid affordable
_AN_DEFAULTS = {1: (32, 1e-8, 2), 2: (16, 1e-6, 2), 3: (8, 0.5, 0), 4: (6, 1.0, 0)}


def default_an_quad(n):
    nodes, tol, refine = _AN_DEFAULTS.get(n, _AN_DEFAULTS[MAX_DEPTH])
    return QuadratureSpec(nodes_per_dim=nodes, rel_tol=tol, max_refinements=refine)


def _coarse(m):
    return max(2, (2 * m) // 3)


def _check_depth(n):
    if n > MAX_DEPTH:
        raise DepthError(f"depth beyond desk scale: n={n} > {MAX_DEPTH}")


def _as_points(lam, X, n):
    lam = np.asarray(lam, dtype=float).ravel()
    X = np.asarray(X, dtype=float).ravel()
    if lam.size != n + 1 or X.size != n + 1:
        raise DomainError(f"A_{n} points need {n + 1} coordinates")
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(X))):
        raise DomainError("non-finite input")
    return lam, X


def log_phi_an(lam, X, spec, quad=None, backend=None):
    """log phi_lambda(e^X) for A_n with multiplicity ``spec.k``.

    X must be dominant.  lam may be any real vector (phi is symmetric in it).
    Gaps of X below 1e-9 are moved to 1e-6 and the result is flagged
    ``regularized``.  The error estimate compares the rule with a coarser one;
    ``quad.max_refinements`` extra doublings are tried when it is too large.
    Very close to the origin the same rule applied at lam = rho (where phi is
    exactly 1) is used as a control variate.
    """
    if not isinstance(spec, RootSystemSpec) or not spec.is_type_a:
        raise DomainError("log_phi_an needs a type A spec")
    n, k = spec.n, spec.k1
    _check_depth(n)
    lam, X = _as_points(lam, X, n)
    if not is_dominant(X):
        raise DomainError("X must be dominant (weakly decreasing)")
    quad = quad or default_an_quad(n)
    g = -np.diff(X)
    if np.all(g == 0):
        return LogResult(float(np.dot(lam, X)), True, 0.0, False, 0)
    regularized = bool(np.any(g < WALL_EPS))
    if regularized:
        # move off the wall keeping the centre of X, so only second-order terms change
        g = np.where(g < WALL_EPS, WALL_OFFSET, g)
        Xr = np.concatenate([np.cumsum(g[::-1])[::-1], [0.0]])
        X = Xr + (X.mean() - Xr.mean())
    lead = float(np.dot(lam, X))
    be = resolve_backend(backend)
    # phi_rho = 1 exactly; near the origin subtracting its quadrature value removes
    # the error the two share
    ref = rho(spec) if (X[0] - X[-1]) * max(np.ptp(lam), 2.0 * k * n) <= SMALL_PHASE else None

    def at(m):
        v = psi(lam, g, k, m, be)
        if ref is not None:
            v -= psi(ref, g, k, m, be) + float(np.dot(ref, X))
        return v

    m = quad.nodes_per_dim
    prev = at(_coarse(m))
    cur = at(m)
    err = abs(cur - prev)
    for _ in range(quad.max_refinements):
        if err <= quad.rel_tol:
            break
        m *= 2
        prev, cur = cur, at(m)
        err = abs(cur - prev)
    ok = bool(np.isfinite(cur) and err <= quad.rel_tol)
    return LogResult(lead + cur, ok, err, regularized, m)


def phi_a1_closed_k1(lam_diff, t, mean_shift=0.0):
    """log of ``e^mean_shift 2 sinh(lt/2) / (l sinh t)`` (A_1, k=1) with its limits."""
    l, t = float(lam_diff), float(t)
    if l < 0 or t < 0:
        raise DomainError("lam_diff and t must be >= 0")
    if t == 0.0:
        return float(mean_shift)
    lst = float(log_sinh(t))
    if l == 0.0:
        return float(mean_shift) + math.log(t) - lst
    return float(mean_shift) + math.log(2.0) + float(log_sinh(0.5 * l * t)) - math.log(l) - lst


# ------------------------------------------------------------ reduced integral

def _log_u_frac(u):
    # log(u/(1+u))
    with np.errstate(divide="ignore"):
        return np.log(u) - np.log1p(u)


def _reduced_integrand_rules(lam, X, k, m, truncated):
    n = X.size - 1
    g = -np.diff(X)
    c = lam[:n] - lam[n]
    e = k - 1.0
    rules = []
    for r in range(n):
        if truncated and r == n - 1:
            half = 0.5 * g[r]
            dlo, dhi, lw = exp_graded_rule(half, c[r], 0.0, e, m)
            rules.append((dlo + half, dhi, lw))
        else:
            rules.append(exp_graded_rule(g[r], c[r], e, e, m))
    return g, c, rules


def _log_reduced(lam, X, k, m, truncated):
    n = X.size - 1
    g, c, rules = _reduced_integrand_rules(lam, X, k, m, truncated)
    # x_i - x_j summed gap by gap
    sp = {(i, j): float(np.sum(g[i:j])) for i in range(n + 1) for j in range(i, n + 1)}
    qs = [r[0].size for r in rules]

    def shaped(arr, r):
        shp = [1] * n
        shp[r] = qs[r]
        return arr.reshape(shp)

    total = np.zeros(qs)
    for r in range(n):
        dlo, dhi, lw = rules[r]
        acc = np.zeros_like(dlo)
        if k != 1.0:
            for s in range(r + 1):
                acc += _log_u_frac(sp[s, r] + dhi)
            for s in range(r + 1, n + 1):
                acc += _log_u_frac(dlo + sp[r + 1, s])
        total = total + shaped(lw + (k - 1.0) * acc - c[r] * dhi, r)
    for i in range(n):
        for j in range(i + 1, n):
            ay = shaped(rules[i][0], i) + sp[i + 1, j] + shaped(rules[j][1], j)
            al = lam[i] - lam[j]
            total = total + (np.log(ay) + (k - 1.0) * np.log1p(al * (1.0 + ay)) - k * np.log1p(al * ay))
    flat = total.ravel()
    mx = np.max(flat)
    return float(mx + np.log(np.sum(np.exp(flat - mx))))


def _reduced(lam, X, k, quad, truncated):
    lam = np.asarray(lam, dtype=float).ravel()
    X = np.asarray(X, dtype=float).ravel()
    n = X.size - 1
    if n < 1 or lam.size != n + 1:
        raise DomainError("lam and X need matching length n+1 >= 2")
    _check_depth(n)
    if not is_dominant(X, strict=True):
        raise DomainError("X must be strictly dominant")
    if not is_dominant(lam):
        raise DomainError("lam must be dominant")
    if not k > 0:
        raise DomainError("k must be > 0")
    quad = quad or QuadratureSpec(nodes_per_dim=16 if n <= 2 else 12)
    m = quad.nodes_per_dim
    prev = _log_reduced(lam, X, k, _coarse(m), truncated)
    cur = _log_reduced(lam, X, k, m, truncated)
    err = abs(cur - prev)
    for _ in range(quad.max_refinements):
        if err <= quad.rel_tol:
            break
        m *= 2
        prev, cur = cur, _log_reduced(lam, X, k, m, truncated)
        err = abs(cur - prev)
    return LogResult(cur, bool(err <= quad.rel_tol), err, False, m)


def log_I_n(lam, X, k, quad=None):
    """log of the reduced n-fold integral with exponential, P_n and T_n factors."""
    return _reduced(lam, X, k, quad, truncated=False)


def log_I_truncated(lam, X, k, quad=None):
    """Same integral with y_n restricted to the upper half of [x_{n+1}, x_n].

    Requires the last simple gap to be the largest one.
    """
    g = -np.diff(np.asarray(X, dtype=float).ravel())
    if g.size and g[-1] < np.max(g):
        raise PreconditionError("γ not maximal: the last simple gap must be the largest")
    return _reduced(lam, X, k, quad, truncated=True)


def log_I_n_estimate(lam, X, k):
    """log of the closed-form two-sided estimate for the reduced integral."""
    lam = np.asarray(lam, dtype=float).ravel()
    X = np.asarray(X, dtype=float).ravel()
    n = X.size - 1
    al, ax = root_values(lam), root_values(X)
    with np.errstate(divide="ignore"):
        log_pi = float(np.sum(np.log(ax)))
    return ((2 * k - 1) * log_pi - k * float(np.sum(np.log1p(al * ax)))
            + (k - 1) * float(np.sum(np.log1p(al * (1 + ax))))
            - (2 * k - 2) * float(np.sum(np.log1p(ax)))
            - (k - 1) * float(np.sum(np.log1p(lam[:n] - lam[n]))))


# ------------------------------------------------------------ k = 1 oracle

def _log_alternant(lam, X, dps=60):
    import mpmath as mp

    with mp.workdps(dps):
        lam_mp = [mp.mpf(float(v)) for v in lam]
        x_mp = [mp.mpf(float(v)) for v in X]
        total = mp.mpf(0)
        for perm in itertools.permutations(range(len(lam))):
            inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
            term = mp.e ** mp.fsum(lam_mp[perm[i]] * x_mp[i] for i in range(len(perm)))
            total += -term if inv % 2 else term
        if total <= 0:
            raise DomainError("alternating sum is not positive; points are not strictly dominant")
        return float(mp.log(total))


def complex_oracle_ratio(lam, X, n, quad=None, backend=None):
    """``phi * pi(lam) * d(X) / sum_w sgn(w) e^<w lam, X>`` for k = 1.

    This ratio is a constant depending on n only.
    """
    lam, X = _as_points(lam, X, n)
    if len(set(lam.tolist())) < lam.size:
        raise DegenerateParameterError("degenerate spectral point: repeated lambda entries")
    if not is_dominant(lam, strict=True) or not is_dominant(X, strict=True):
        raise DomainError("lam and X must be strictly dominant")
    res = log_phi_an(lam, X, RootSystemSpec.type_a(n, 1.0), quad, backend)
    lpi = float(np.sum(np.log(root_values(lam))))
    ld = float(np.sum(log_sinh(root_values(X))))
    return math.exp(res.value + lpi + ld - _log_alternant(lam, X))


def complex_oracle_constant(n, scale=1e-3, quad=None, backend=None):
    """Value of the k=1 ratio at a small X (its X -> 0 limit)."""
    lam = np.arange(n, -1, -1, dtype=float)
    X = scale * np.arange(n, -1, -1, dtype=float)
    return complex_oracle_ratio(lam, X, n, quad, backend)
