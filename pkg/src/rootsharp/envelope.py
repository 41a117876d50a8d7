"""Sharp-estimate envelope: the single-root factor, the four-region classifier and
the monotone helper functions used by the lemma checks."""
import enum
import math

import numpy as np

from .rootcore import pair, positive_roots, rho, root_values


class RegionLabel(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


def log_f_alpha(a_lambda, a_x, k):
    """log of ``(1+al*ax)^-k ((1+al(1+ax))/(1+al))^(k-1)``; works on arrays."""
    al = np.asarray(a_lambda, dtype=float)
    ax = np.asarray(a_x, dtype=float)
    out = -k * np.log1p(al * ax) + (k - 1.0) * (np.log1p(al * (1.0 + ax)) - np.log1p(al))
    return out if out.ndim else float(out)


def f_alpha(a_lambda, a_x, k):
    return np.exp(log_f_alpha(a_lambda, a_x, k))


def classify_region(a_lambda, a_x):
    """Region of ``(alpha(lambda), alpha(X))``; ties go to the earlier region."""
    p = a_lambda * a_x
    if p <= 1.0:
        return RegionLabel.I
    if a_x <= 1.0:
        return RegionLabel.II
    if a_lambda <= 1.0:
        return RegionLabel.III
    return RegionLabel.IV


def region_closure(a_lambda, a_x, tol=1e-12):
    """Every region whose closed inequalities hold at the point (boundaries are shared).

    Comparisons with 1 are made on logs with tolerance ``tol``.
    """
    def sgn(v):
        if v == 0:
            return -1
        lv = math.log(v)
        return 0 if abs(lv) <= tol else (1 if lv > 0 else -1)

    sl, sx = sgn(a_lambda), sgn(a_x)
    sp = -1 if (a_lambda == 0 or a_x == 0) else sgn(a_lambda * a_x)
    out = []
    if sp <= 0:
        out.append(RegionLabel.I)
    if sp >= 0:
        if sx <= 0:
            out.append(RegionLabel.II)
        if sx >= 0:
            if sl <= 0:
                out.append(RegionLabel.III)
            if sl >= 0:
                out.append(RegionLabel.IV)
    return tuple(out)


def log_region_asymptote(a_lambda, a_x, k, region=None):
    """log of the power-law asymptote of f_alpha in its region."""
    region = region or classify_region(a_lambda, a_x)
    if region is RegionLabel.I:
        return 0.0
    if region is RegionLabel.II:
        return -k * math.log(a_lambda * a_x)
    if region is RegionLabel.III:
        return -math.log(a_lambda * a_x)
    return -k * math.log(a_lambda) - math.log(a_x)


def log_estimate(spec, lam, X):
    """Log of the conjectured envelope for phi_lambda(e^X).

    ``(lambda - rho)(X) + sum over indivisible roots of log(1+alpha(X)) + log f_alpha``.
    """
    lam, X = pair(spec, lam, X)
    lead = float(np.dot(lam - rho(spec), X))
    al = root_values(lam)
    ax = root_values(X)
    return lead + float(np.sum(np.log1p(ax) + log_f_alpha(al, ax, spec.k)))


def root_regions(spec, lam, X):
    """Region label of each positive root, in positive_roots order."""
    lam, X = pair(spec, lam, X)
    return [classify_region(r(lam), r(X)) for r in positive_roots(spec)]


# monotone helpers; vectorized in u

def F1(u, a, k=None):
    return u / (1 + a * u)


def F2(u, a, k):
    return u * (1 + a * (1 + u)) ** (k - 1) / (1 + a * u) ** k


def F3(u, a, k=None):
    return u * (1 + a * (1 + u)) / ((1 + u) * (1 + a * u))


def F4(u, a, k=None):
    return (1 + a * u) / (1 + a * (1 + u))


def F5(u, a, k=None):
    return (1 + u) / (1 + a * (1 + u))


MONOTONE_FUNCTIONS = {"F1": F1, "F2": F2, "F3": F3, "F4": F4, "F5": F5}


def ab_middle(u, a, k):
    """``(1+u)(1+a(1+u))^(k-1)/(1+a u)^k``, sandwiched by 1/(1+a) and (1+a)^k/a."""
    return np.exp(np.log1p(u) + (k - 1) * np.log1p(a * (1 + u)) - k * np.log1p(a * u))
