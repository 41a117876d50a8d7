"""phi_lambda(e^t) for BC1 by two independent routes, and the rank-one
four-region envelope."""
import enum
import math

import numpy as np

from .envelope import RegionLabel, classify_region
from .errors import DegenerateParameterError, DomainError
from .eval_an import LogResult
from .quadrature import QuadratureSpec, gauss_jacobi_rule
from .rootcore import log_sinh
from .specfun import log_gamma, log_gauss_2f1

NUDGE = 1e-6
MAX_GRADING = 20
LOG4 = math.log(4.0)


class BC1Method(enum.Enum):
    HYPERGEOMETRIC = "hyp"
    DOUBLE_INTEGRAL = "integral"


def _method(method):
    if isinstance(method, BC1Method):
        return method
    try:
        return BC1Method(str(method).lower())
    except ValueError:
        raise DomainError(f"unknown BC1 method {method!r}") from None


def _check(lam, t, k1, k2):
    if not (lam >= 0 and t >= 0 and k1 > 0 and k2 >= 0):
        raise DomainError("BC1 needs lam >= 0, t >= 0, k1 > 0, k2 >= 0")


def _log_hyp(lam, t, k1, k2, threshold):
    rho = k1 + 2.0 * k2
    a, b, c = 0.5 * (rho + lam), 0.5 * (rho - lam), k1 + k2 + 0.5
    z = -math.exp(2.0 * float(log_sinh(t)))
    lv, sg = log_gauss_2f1(a, b, c, z, threshold=threshold)
    if sg <= 0:
        raise DomainError(f"non-positive hypergeometric value at lam={lam}, t={t}")
    return lv


def log_phi_bc1_hyp(lam, t, k1, k2, quad=None):
    lam, t = float(lam), float(t)
    _check(lam, t, k1, k2)
    if t == 0.0:
        return LogResult(0.0)
    thr = (quad or QuadratureSpec()).regime_threshold
    try:
        return LogResult(_log_hyp(lam, t, k1, k2, thr))
    except DegenerateParameterError:
        # phi is analytic and even in lam: a symmetric nudge recovers the limit
        lo = _log_hyp(abs(lam - NUDGE), t, k1, k2, thr)
        hi = _log_hyp(lam + NUDGE, t, k1, k2, thr)
        return LogResult(0.5 * (lo + hi), True, abs(hi - lo) * NUDGE, True, 0)


def _graded_unit(m, e_lo, e_hi, depth_lo, depth_hi):
    """Composite rule on [-1, 1] for ``f(x) (1+x)**e_lo (1-x)**e_hi``.

    Breakpoints sit at distances 4**-j (j = 0..depth) from each graded end.
    Returns ``(dist_lo, dist_hi, log_w)`` with ``dist_lo = 1+x`` and
    ``dist_hi = 1-x`` both accurate near their end.
    """
    lo_cuts = [4.0 ** -j for j in range(depth_lo, 0, -1)]   # distances from -1, increasing
    hi_cuts = [4.0 ** -j for j in range(1, depth_hi + 1)]   # distances from +1, decreasing
    # panels as (dist_lo of left end, dist_hi of right end)
    edges_lo = [0.0] + lo_cuts + [1.0]
    panels = [(edges_lo[i], 2.0 - edges_lo[i + 1]) for i in range(len(edges_lo) - 1)]
    edges_hi = [1.0] + hi_cuts + [0.0]
    panels += [(2.0 - edges_hi[i], edges_hi[i + 1]) for i in range(len(edges_hi) - 1)]
    out_lo, out_hi, out_w = [], [], []
    for p_lo, q_hi in panels:
        first, last = p_lo == 0.0, q_hi == 0.0
        rule = gauss_jacobi_rule(m, e_hi if last else 0.0, e_lo if first else 0.0)
        half = 0.5 * (2.0 - p_lo - q_hi)
        d_lo = p_lo + half * rule.one_plus
        d_hi = q_hi + half * rule.one_minus
        lw = rule.log_weights + math.log(half)
        lw = lw + (e_lo * math.log(half) if first else e_lo * np.log(d_lo))
        lw = lw + (e_hi * math.log(half) if last else e_hi * np.log(d_hi))
        out_lo.append(d_lo)
        out_hi.append(d_hi)
        out_w.append(lw)
    return np.concatenate(out_lo), np.concatenate(out_hi), np.concatenate(out_w)


def _grading_depth(lam, t, rho):
    # resolve the peak width, about e^{-2t} at the dip and 1/|lam-rho| at the top
    scale = min(2.0 * math.exp(-2.0 * t), 1.0 / (1.0 + abs(lam - rho) * t))
    return int(min(MAX_GRADING, max(1, math.ceil(math.log(8.0 / scale, 4.0)))))


def _log_integral_at(lam, t, k1, k2, m):
    rho = k1 + 2.0 * k2
    depth = _grading_depth(lam, t, rho)
    # r in [0, 1] as x = 2r - 1: weight r^(2k2) (1-r)^(k1-1), smooth (1+r)^(k1-1)
    r_lo, r_hi, lw_r = _graded_unit(m, 2.0 * k2, k1 - 1.0, 1, depth)
    r = 0.5 * r_lo
    one_m_r = 0.5 * r_hi
    lw_r = lw_r - (k1 + 2.0 * k2) * math.log(2.0) + (k1 - 1.0) * np.log1p(r)
    # v = cos(phi) in [-1, 1]: weight (1-v^2)^(k2-1)
    v_lo, v_hi, lw_v = _graded_unit(m, k2 - 1.0, k2 - 1.0, depth, depth)
    E = math.exp(-2.0 * t)
    B = -math.expm1(-2.0 * t)
    R = r[:, None]
    OMR = one_m_r[:, None]
    VLO = v_lo[None, :]
    VHI = v_hi[None, :]
    V = 0.5 * (VLO - VHI)
    # 1 + r v and 1 - r v as sums of non-negative terms
    one_p_rv = np.where(V < 0, VLO - V * OMR, 1.0 + R * V)
    one_m_rv = np.where(V > 0, VHI + V * OMR, 1.0 - R * V)
    inner = (one_p_rv + one_m_rv * E) ** 2 + R * R * VLO * VHI * B * B
    log_base2 = 2.0 * t - LOG4 + np.log(inner)
    vals = lw_r[:, None] + lw_v[None, :] + 0.5 * (lam - rho) * log_base2
    mx = vals.max()
    log_pref = (math.log(2.0) + log_gamma(k1 + k2 + 0.5) - 0.5 * math.log(math.pi)
                - log_gamma(k1) - log_gamma(k2))
    return float(log_pref + mx + math.log(np.exp(vals - mx).sum()))


def log_phi_bc1_integral(lam, t, k1, k2, quad=None):
    lam, t = float(lam), float(t)
    _check(lam, t, k1, k2)
    if k2 == 0:
        raise DomainError("the double-integral route needs k2 > 0")
    if t == 0.0:
        return LogResult(0.0)
    quad = quad or QuadratureSpec()
    m = quad.nodes_per_dim
    prev = _log_integral_at(lam, t, k1, k2, m)
    err = math.inf
    for _ in range(quad.max_refinements):
        m *= 2
        cur = _log_integral_at(lam, t, k1, k2, m)
        err = abs(cur - prev)
        prev = cur
        if err <= quad.rel_tol:
            break
    return LogResult(prev, bool(err <= quad.rel_tol), err, False, m)


def log_phi_bc1(lam, t, k1, k2, method="hyp", quad=None):
    """log phi_lambda(e^t) for BC1 with multiplicities (k1, k2)."""
    if _method(method) is BC1Method.HYPERGEOMETRIC:
        return log_phi_bc1_hyp(lam, t, k1, k2, quad)
    return log_phi_bc1_integral(lam, t, k1, k2, quad)


def bc1_region_envelope(lam, t, k1, k2):
    """Region of (lam, t) and the log of its power-law asymptote times e^((lam-rho)t)."""
    lam, t = float(lam), float(t)
    _check(lam, t, k1, k2)
    rho = k1 + 2.0 * k2
    k = k1 + k2
    lead = (lam - rho) * t
    region = classify_region(lam, t)
    if region is RegionLabel.I:
        return region, lead + math.log1p(t)
    if region is RegionLabel.II:
        return region, lead - k * math.log(lam * t)
    if region is RegionLabel.III:
        return region, lead - math.log(lam)
    return region, lead - k * math.log(lam)
