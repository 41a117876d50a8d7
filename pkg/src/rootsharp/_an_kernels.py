"""Hot loops for the A_n recursion.

Both backends compute

    psi_n(lam, g) = log phi_lam(e^X) - lam(X)

where ``g`` holds the simple gaps x_r - x_{r+1} of X.  psi depends only on the
gaps and on differences of lam.  One recursion level integrates over the
interlacing box; every y_r is parameterized by its distance ``dtop`` to x_r and
``dbot`` to x_{r+1}, and all differences that enter a sinh are rebuilt from
gaps so nothing cancels.

Rule table ``tab`` (shape (7, m)), with e = k - 1:
rows 0-2 hold 1+xi, 1-xi and log weights of the m-point Gauss-Jacobi rule with
exponents (e, e); rows 3-4 hold 1+xi and log weights of the m-point rule with
exponent e at xi=-1 only; rows 5-6 the same for the ``hm``-point rule (first
``hm`` entries).  The node layout per coordinate follows
``quadrature.exp_graded_rule``.
"""
import math

import numpy as np

from ._accel import njit
from .quadrature import LOG_MAP_SCALE, SHORT_PANEL, gauss_jacobi_rule, half_count, trunc_level

LOG2 = math.log(2.0)
NEG_INF = -np.inf


def rule_tables(m, k):
    e = k - 1.0
    hm = half_count(m)
    full = gauss_jacobi_rule(m, e, e)
    one = gauss_jacobi_rule(m, 0.0, e)
    half = gauss_jacobi_rule(hm, 0.0, e)
    tab = np.zeros((7, max(m, hm)))
    tab[0, :m], tab[1, :m], tab[2, :m] = full.one_plus, full.one_minus, full.log_weights
    tab[3, :m], tab[4, :m] = one.one_plus, one.log_weights
    tab[5, :hm], tab[6, :hm] = half.one_plus, half.log_weights
    return tab, hm


def log_norm_consts(k, nmax):
    """log Gamma(k(n+1)) - (n+1) log Gamma(k) for n = 0..nmax."""
    out = np.zeros(nmax + 1)
    for n in range(1, nmax + 1):
        out[n] = math.lgamma(k * (n + 1)) - (n + 1) * math.lgamma(k)
    return out


# ---------------------------------------------------------------- numba path

@njit
def _logsinh(z):
    if z <= 0.0:
        return -np.inf
    return z - LOG2 + math.log(-math.expm1(-2.0 * z))


@njit
def _mapped(extent, e, tab, row, cnt, from_top, length, dlo, dhi, lw, off):
    T = math.log1p(extent / LOG_MAP_SCALE)
    lt = math.log(0.5 * T)
    for j in range(cnt):
        op = tab[row, j]
        d = LOG_MAP_SCALE * math.expm1(0.5 * T * op)
        if from_top:
            dhi[off + j] = d
            dlo[off + j] = length - d
        else:
            dlo[off + j] = d
            dhi[off + j] = length - d
        lw[off + j] = tab[row + 1, j] + lt + math.log(LOG_MAP_SCALE + d) - e * math.log(op)
    return off + cnt


@njit
def _graded(length, rate, e, level, tab, hm, dlo, dhi, lw):
    """Fill nodes for one coordinate; returns the node count."""
    m = tab.shape[1]
    sig = abs(rate) * length
    if sig > level:
        return _mapped(level / abs(rate), e, tab, 3, m, rate > 0, length, dlo, dhi, lw, 0)
    if length <= SHORT_PANEL:
        half = 0.5 * length
        lh = math.log(half)
        for j in range(m):
            dlo[j] = half * tab[0, j]
            dhi[j] = half * tab[1, j]
            lw[j] = tab[2, j] + lh - e * (math.log(tab[0, j]) + math.log(tab[1, j]))
        return m
    off = _mapped(0.5 * length, e, tab, 5, hm, False, length, dlo, dhi, lw, 0)
    return _mapped(0.5 * length, e, tab, 5, hm, True, length, dlo, dhi, lw, off)


@njit
def _psi1(d, g, k, level, const1, tab, hm):
    q = tab.shape[1]
    dlo = np.empty(q)
    dhi = np.empty(q)
    lw = np.empty(q)
    cnt = _graded(g, d, k - 1.0, level, tab, hm, dlo, dhi, lw)
    mx = -np.inf
    vals = np.empty(cnt)
    for j in range(cnt):
        v = lw[j] - d * dhi[j]
        if k != 1.0:
            v += (k - 1.0) * (_logsinh(dhi[j]) + _logsinh(dlo[j]))
        vals[j] = v
        if v > mx:
            mx = v
    s = 0.0
    for j in range(cnt):
        s += math.exp(vals[j] - mx)
    return const1 + (1.0 - 2.0 * k) * _logsinh(g) + mx + math.log(s)


@njit
def psi_numba(lam, g, k, level, consts, tab, hm):
    n = g.size
    if n == 0:
        return 0.0
    if n == 1:
        return _psi1(lam[0] - lam[1], g[0], k, level, consts[1], tab, hm)
    e = k - 1.0
    q = tab.shape[1]
    c = lam[:n] - lam[n]
    shat = np.sort(lam[:n])[::-1] - lam[n]
    # x_i - x_j = sp[i, j], summed gap by gap (prefix-sum differences cancel
    # when a small gap follows a large one)
    sp = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            sp[i, j] = sp[i, j - 1] + g[j - 1]
    dlo = np.empty((n, q))
    dhi = np.empty((n, q))
    lw = np.empty((n, q))
    cnt = np.empty(n, np.int64)
    for r in range(n):
        cnt[r] = _graded(g[r], shat[r], e, level, tab, hm, dlo[r], dhi[r], lw[r])
    row = np.empty((n, q))
    for r in range(n):
        for j in range(cnt[r]):
            acc = 0.0
            if k != 1.0:
                for s in range(r + 1):
                    acc += _logsinh(sp[s, r] + dhi[r, j])
                for s in range(r + 1, n + 1):
                    acc += _logsinh(dlo[r, j] + sp[r + 1, s])
            row[r, j] = lw[r, j] + e * acc - c[r] * dhi[r, j]
    pair = np.zeros((n, n, q, q))
    for i in range(n):
        for j in range(i + 1, n):
            mid = sp[i + 1, j]
            for a in range(cnt[i]):
                for b in range(cnt[j]):
                    pair[i, j, a, b] = _logsinh(dlo[i, a] + mid + dhi[j, b])
    lam0 = c.copy()
    idx = np.zeros(n, np.int64)
    h = np.empty(n - 1)
    mx = -np.inf
    s = 0.0
    while True:
        v = 0.0
        for r in range(n):
            v += row[r, idx[r]]
        for i in range(n):
            for j in range(i + 1, n):
                v += pair[i, j, idx[i], idx[j]]
        for r in range(n - 1):
            h[r] = dlo[r, idx[r]] + dhi[r + 1, idx[r + 1]]
        v += psi_numba(lam0, h, k, level, consts, tab, hm)
        if v > mx:
            s = s * math.exp(mx - v) + 1.0
            mx = v
        else:
            s += math.exp(v - mx)
        # odometer
        r = n - 1
        while r >= 0:
            idx[r] += 1
            if idx[r] < cnt[r]:
                break
            idx[r] = 0
            r -= 1
        if r < 0:
            break
    logdx = 0.0
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            logdx += _logsinh(sp[i, j])
    return consts[n] + (1.0 - 2.0 * k) * logdx + mx + math.log(s)


# ---------------------------------------------------------------- numpy path

def _np_logsinh(z):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(z > 0, z - LOG2 + np.log(-np.expm1(-2.0 * np.maximum(z, 1e-300))), -np.inf)


def _np_graded(lengths, rate, e, level, tab, hm):
    """Vectorized node layout over a batch of interval lengths.

    Returns ``(dlo, dhi, lw)`` of shape ``(B, m)``; unused slots have weight -inf.
    """
    m = tab.shape[1]
    L = np.asarray(lengths, dtype=float)
    B = L.size
    sig = abs(rate) * L
    trunc = sig > level
    short = ~trunc & (L <= SHORT_PANEL)
    halves = ~trunc & ~short
    dlo = np.full((B, m), 1.0)
    dhi = np.full((B, m), 1.0)
    lw = np.full((B, m), -np.inf)

    def mapped(mask, sl, extent, row, cnt, from_top):
        if not mask.any():
            return
        T = np.log1p(extent[mask] / LOG_MAP_SCALE)[:, None]
        op = tab[row, :cnt]
        d = LOG_MAP_SCALE * np.expm1(0.5 * T * op)
        far = L[mask][:, None] - d
        dhi[mask, sl] = d if from_top else far
        dlo[mask, sl] = far if from_top else d
        lw[mask, sl] = tab[row + 1, :cnt] + np.log(0.5 * T) + np.log(LOG_MAP_SCALE + d) - e * np.log(op)

    if rate != 0:
        mapped(trunc, slice(0, m), np.full(B, level / abs(rate)), 3, m, rate > 0)
    if short.any():
        half = 0.5 * L[short][:, None]
        dlo[short] = half * tab[0]
        dhi[short] = half * tab[1]
        lw[short] = tab[2] + np.log(half) - e * (np.log(tab[0]) + np.log(tab[1]))
    mapped(halves, slice(0, hm), 0.5 * L, 5, hm, False)
    mapped(halves, slice(hm, 2 * hm), 0.5 * L, 5, hm, True)
    return dlo, dhi, lw


def _lse(v, axis):
    mx = np.max(v, axis=axis, keepdims=True)
    mx = np.where(np.isfinite(mx), mx, 0.0)
    with np.errstate(divide="ignore"):
        return np.squeeze(mx, axis=axis) + np.log(np.sum(np.exp(v - mx), axis=axis))


def _np_spans(G):
    # sp[:, i, j] = x_i - x_j for i <= j, summed gap by gap
    B, n = G.shape
    sp = np.zeros((B, n + 1, n + 1))
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            sp[:, i, j] = sp[:, i, j - 1] + G[:, j - 1]
    return sp


CHUNK = 1 << 18


def psi_numpy(lam, G, k, level, consts, tab, hm):
    """Batched psi over rows of ``G`` (shape (B, n)); same lam for every row."""
    lam = np.asarray(lam, dtype=float)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    B, n = G.shape
    if n == 0:
        return np.zeros(B)
    e = k - 1.0
    qmax = tab.shape[1]
    per = max(1, CHUNK // (qmax ** n))
    if B > per:
        return np.concatenate([psi_numpy(lam, G[i:i + per], k, level, consts, tab, hm)
                               for i in range(0, B, per)])
    c = lam[:n] - lam[n]
    shat = np.sort(lam[:n])[::-1] - lam[n]
    sp = _np_spans(G)
    nodes = [_np_graded(G[:, r], shat[r], e, level, tab, hm) for r in range(n)]
    qs = [nd[0].shape[1] for nd in nodes]

    def bshape(r):
        # broadcast a (B, q_r) array along dimension r of (B, q_0, ..., q_{n-1})
        shp = [B] + [1] * n
        shp[r + 1] = qs[r]
        return shp

    total = np.zeros([B] + qs)
    for r in range(n):
        dlo, dhi, lw = nodes[r]
        acc = np.zeros_like(dlo)
        if k != 1.0:
            for s in range(r + 1):
                acc += _np_logsinh(sp[:, s, r, None] + dhi)
            for s in range(r + 1, n + 1):
                acc += _np_logsinh(dlo + sp[:, r + 1, s, None])
        row = lw + e * acc - c[r] * dhi
        total = total + row.reshape(bshape(r))
    for i in range(n):
        for j in range(i + 1, n):
            mid = sp[:, i + 1, j].reshape([B] + [1] * n)
            total = total + _np_logsinh(nodes[i][0].reshape(bshape(i)) + mid
                                        + nodes[j][1].reshape(bshape(j)))
    if n > 1:
        H = np.stack([np.broadcast_to(nodes[r][0].reshape(bshape(r)) + nodes[r + 1][1].reshape(bshape(r + 1)),
                                      [B] + qs).reshape(-1) for r in range(n - 1)], axis=1)
        inner = psi_numpy(c, H, k, level, consts, tab, hm).reshape([B] + qs)
        total = total + inner
    flat = total.reshape(B, -1)
    logdx = np.zeros(B)
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            logdx += _np_logsinh(sp[:, i, j])
    return consts[n] + (1.0 - 2.0 * k) * logdx + _lse(flat, axis=1)


def psi(lam, g, k, m, backend, level=None):
    """psi for one point with an m-point base rule on the chosen backend."""
    lam = np.ascontiguousarray(lam, dtype=float)
    g = np.ascontiguousarray(g, dtype=float)
    level = trunc_level(m) if level is None else level
    tab, hm = rule_tables(m, k)
    consts = log_norm_consts(k, g.size)
    if backend == "numba":
        return float(psi_numba(lam, g, float(k), float(level), consts, tab, hm))
    return float(psi_numpy(lam, g[None, :], float(k), float(level), consts, tab, hm)[0])
