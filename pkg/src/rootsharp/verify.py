"""Ratio sweeps of log phi against the envelope, the lemma suite, and report files."""
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass, field
import io
import json
import math
from typing import Optional

import numpy as np

from .envelope import (MONOTONE_FUNCTIONS, RegionLabel, ab_middle, classify_region,
                       log_estimate, log_f_alpha, log_region_asymptote, region_closure)
from .errors import ConvergenceError, DomainError
from .eval_an import default_an_quad, log_I_n, log_I_truncated, log_phi_an
from .eval_bc1 import log_phi_bc1
from .quadrature import QuadratureSpec
from .rootcore import RootSystemSpec, root_values
from .specfun import lemma_b_integral, lower_gamma

CSV_COLUMNS = ("system", "n", "k1", "k2", "region", "alpha_lambda", "alpha_x",
               "log_phi", "log_estimate", "log_ratio", "converged")
SHAPE_RANGE = (0.5, 2.0)
LEMMA_KS = (0.25, 0.5, 1.0, 2.0, 3.5)


@dataclass(frozen=True)
class SweepConfig:
    """Grid of highest-root values (alpha(lam), alpha(X)), log-spaced on [grid_lo, grid_hi].

    For A_n the simple roots split the highest root value with fixed random
    shares drawn from ``seed``.
    """
    system: RootSystemSpec
    grid_lo: float = 1e-2
    grid_hi: float = 1e2
    points_per_axis: int = 9
    quad: Optional[QuadratureSpec] = None
    seed: int = 0
    workers: int = 1
    backend: Optional[str] = None

    def __post_init__(self):
        if not (0 < self.grid_lo < self.grid_hi):
            raise DomainError("need 0 < grid_lo < grid_hi")
        if self.points_per_axis < 2:
            raise DomainError("points_per_axis must be >= 2")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")

    def resolved_quad(self):
        if self.quad is not None:
            return self.quad
        if self.system.is_type_a:
            return default_an_quad(self.system.n)
        return QuadratureSpec()

    def refined(self, points=True, nodes=True):
        """Config with the grid and/or the node count doubled (old grid points kept)."""
        q = self.resolved_quad()
        if nodes:
            q = QuadratureSpec(2 * q.nodes_per_dim, q.jacobi_exponents, q.rel_tol,
                               q.max_refinements, q.regime_threshold)
        ppa = 2 * self.points_per_axis - 1 if points else self.points_per_axis
        return SweepConfig(self.system, self.grid_lo, self.grid_hi, ppa, q, self.seed,
                           self.workers, self.backend)


@dataclass(frozen=True)
class SweepPoint:
    alpha_lambda: float
    alpha_x: float
    region: str
    lam: tuple
    X: tuple
    roots_lambda: tuple
    roots_x: tuple
    log_phi: float
    log_estimate: float
    log_ratio: float
    converged: bool
    error: float


@dataclass(frozen=True)
class RegionStats:
    count: int
    min_log_ratio: float
    max_log_ratio: float
    argmin: tuple
    argmax: tuple

    @property
    def spread(self):
        return self.max_log_ratio - self.min_log_ratio


@dataclass
class RatioReport:
    system: str
    n: int
    k1: float
    k2: float
    grid: dict
    regions: dict = field(default_factory=dict)
    unconverged: int = 0
    points: list = field(default_factory=list)

    def spread(self, region):
        return self.regions[RegionLabel(region).value].spread

    def spreads(self):
        return {lab: st.spread for lab, st in self.regions.items()}


def _shares(rng, n):
    w = rng.uniform(*SHAPE_RANGE, n)
    return w / w.sum()


def _chamber_point(gaps):
    # cumulative sums from the bottom, last coordinate 0
    return np.concatenate([np.cumsum(gaps[::-1])[::-1], [0.0]])


def axis_grid(lo, hi, points):
    """``points`` log-spaced values on [lo, hi], plus 1 and the reciprocals that fall
    inside the range, so every region boundary is sampled."""
    base = np.geomspace(lo, hi, points)
    extra = [1.0 / g for g in base if lo <= 1.0 / g <= hi]
    if lo < 1.0 < hi:
        extra.append(1.0)
    vals = sorted(base.tolist() + extra)
    out = [vals[0]]
    for v in vals[1:]:
        if abs(math.log(v / out[-1])) > 1e-9:
            out.append(v)
    return np.array(out)


def sweep_points(cfg):
    """The (alpha_lambda, alpha_x, lam, X) grid of a sweep, in row-major order."""
    grid = axis_grid(cfg.grid_lo, cfg.grid_hi, cfg.points_per_axis)
    spec = cfg.system
    out = []
    if spec.is_type_a:
        rng = np.random.default_rng(cfg.seed)
        wl, wx = _shares(rng, spec.n), _shares(rng, spec.n)
        for al in grid:
            for ax in grid:
                out.append((float(al), float(ax), _chamber_point(al * wl), _chamber_point(ax * wx)))
    else:
        for al in grid:
            for ax in grid:
                out.append((float(al), float(ax), np.array([al]), np.array([ax])))
    return out


def _eval_point(args):
    spec, quad, backend, al, ax, lam, X = args
    if spec.is_type_a:
        res = log_phi_an(lam, X, spec, quad, backend)
    else:
        res = log_phi_bc1(lam[0], X[0], spec.k1, spec.k2, "hyp", quad)
    est = log_estimate(spec, lam, X)
    return SweepPoint(al, ax, _region(al, ax).value, tuple(lam.tolist()), tuple(X.tolist()),
                      tuple(root_values(lam).tolist()), tuple(root_values(X).tolist()),
                      float(res.value), float(est), float(res.value - est), bool(res.converged),
                      float(res.error))


def _region(al, ax):
    # tie rule of classify_region, with grid values that sit on a boundary up to
    # rounding treated as on it
    return region_closure(al, ax)[0]


def _sort_key(p):
    return (p.region, p.alpha_lambda, p.alpha_x)


def summarize(points):
    """Per-region records over converged, finite points.

    ``count`` is the number of points carrying the region label.  The extremes
    run over the closed region, so boundary points count for every region they
    touch; the ratio is continuous and the closed extremes settle quickly
    under grid refinement.
    """
    good = [p for p in points if p.converged and math.isfinite(p.log_ratio)]
    closure = {id(p): {lab.value for lab in region_closure(p.alpha_lambda, p.alpha_x)} for p in good}
    regions = {}
    for lab in RegionLabel:
        pts = [p for p in good if lab.value in closure[id(p)]]
        if not pts:
            continue
        lo = min(pts, key=lambda p: (p.log_ratio, _sort_key(p)))
        hi = max(pts, key=lambda p: (p.log_ratio, _sort_key(p)))
        count = sum(1 for p in good if p.region == lab.value)
        regions[lab.value] = RegionStats(count, lo.log_ratio, hi.log_ratio,
                                         (lo.alpha_lambda, lo.alpha_x), (hi.alpha_lambda, hi.alpha_x))
    return regions


def run_conjecture_sweep(cfg):
    """log phi - log_estimate over the grid of ``cfg``, summarized per region."""
    spec = cfg.system
    quad = cfg.resolved_quad()
    jobs = [(spec, quad, cfg.backend, al, ax, lam, X) for al, ax, lam, X in sweep_points(cfg)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            points = list(ex.map(_eval_point, jobs, chunksize=4))
    else:
        points = [_eval_point(j) for j in jobs]
    points.sort(key=_sort_key)
    bad = sum(1 for p in points if not p.converged)
    if points and bad == len(points):
        raise ConvergenceError(f"no grid point converged (rel_tol={quad.rel_tol})")
    grid = {"grid_lo": cfg.grid_lo, "grid_hi": cfg.grid_hi, "points_per_axis": cfg.points_per_axis,
            "seed": cfg.seed, "nodes_per_dim": quad.nodes_per_dim, "rel_tol": quad.rel_tol}
    return RatioReport(spec.label, spec.n, spec.k1, spec.k2, grid, summarize(points), bad, points)


def spread_change(base, refined):
    """Relative change of every per-region spread between two reports."""
    out = {}
    for lab, st in base.regions.items():
        other = refined.regions.get(lab)
        if other is None:
            out[lab] = math.inf
            continue
        s0, s1 = st.spread, other.spread
        out[lab] = abs(s1 - s0) / max(abs(s0), abs(s1), 1e-300)
    return out


# ------------------------------------------------------------------ truncation

TRUNCATION_SHAPES = (0.4, 1.0)


def truncation_ratio_sweep(k, grid_lo=1e-2, grid_hi=1e2, points=9, nodes=16, n=2):
    """log(I^(n) / I_1) over a sweep grid with the last gap of X the largest.

    For each axis pair the lambda gaps are (1, 0.6) times alpha_lambda and the X
    gaps are (w, 1) times alpha_x for w in ``TRUNCATION_SHAPES``.
    """
    if n != 2:
        raise DomainError("the truncation sweep is laid out for n = 2")
    quad = QuadratureSpec(nodes_per_dim=nodes, rel_tol=1e-6, max_refinements=2)
    grid = axis_grid(grid_lo, grid_hi, points)
    vals, bad = [], 0
    for al in grid:
        lam = _chamber_point(al * np.array([1.0, 0.6]))
        for ax in grid:
            for w in TRUNCATION_SHAPES:
                X = _chamber_point(ax * np.array([w, 1.0]))
                full, trunc = log_I_n(lam, X, k, quad), log_I_truncated(lam, X, k, quad)
                bad += (not full.converged) or (not trunc.converged)
                vals.append(full.value - trunc.value)
    v = np.array(vals)
    return {"count": int(v.size), "min": float(v.min()), "max": float(v.max()),
            "spread": float(v.max() - v.min()), "unconverged": int(bad)}


# ------------------------------------------------------------------ lemma suite

def _log_grid(lo, hi, pts):
    return np.geomspace(lo, hi, pts)


def _range_check(name, ratio_fn, grids, rel=0.05):
    """Bounded positive ratio over nested grids, with the log spread stable under refinement."""
    spreads = []
    detail = {}
    for g in grids:
        vals = np.array([ratio_fn(*pt) for pt in g])
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            i = int(np.argmax(~np.isfinite(vals) | (vals <= 0)))
            return False, {"violation": list(map(float, g[i])), "value": float(vals[i])}
        lv = np.log(vals)
        spreads.append(float(lv.max() - lv.min()))
        detail = {"min": float(vals.min()), "max": float(vals.max())}
    s0, s1 = spreads[0], spreads[-1]
    stable = abs(s1 - s0) <= rel * max(s0, s1) + 1e-12
    detail.update({"log_spread": spreads, "stable": bool(stable)})
    return bool(stable), detail


def check_lemma_a(points=33, ks=LEMMA_KS):
    res = {}
    for k in ks:
        grids = [[(x,) for x in _log_grid(1e-4, 1e4, p)] for p in (points, 2 * points - 1)]
        ok, det = _range_check("A", lambda x: lower_gamma(k, x) / (x / (1 + x)) ** k, grids)
        res[str(k)] = dict(det, passed=ok)
    return all(r["passed"] for r in res.values()), res


def lemma_b_rhs(a, x, k):
    return math.exp(k * math.log(x / (1 + x)) + math.log1p(x) - k * math.log1p(a * x)
                    + (k - 1) * (math.log1p(a * (1 + x)) - math.log1p(a)))


def check_lemma_b(points=33, ks=LEMMA_KS):
    res = {}
    for k in ks:
        grids = []
        for p in (points, 2 * points - 1):
            g = _log_grid(1e-4, 1e4, p)
            grids.append([(a, x) for a in g for x in g])
        ok, det = _range_check("B", lambda a, x: lemma_b_integral(a, x, k) / lemma_b_rhs(a, x, k), grids)
        res[str(k)] = dict(det, passed=ok)
    return all(r["passed"] for r in res.values()), res


def check_monotone(samples=10_000, seed=1):
    rng = np.random.default_rng(seed)
    res = {}
    for name, F in MONOTONE_FUNCTIONS.items():
        u = np.sort(10.0 ** rng.uniform(-4, 4, (samples, 2)), axis=1)
        u[: samples // 20, 0] = 0.0
        a = 10.0 ** rng.uniform(-4, 4, samples)
        a[: samples // 20] = 0.0
        # the k-dependent function is only claimed monotone for k <= 1
        k = rng.uniform(0.01, 1.0, samples) if name == "F2" else rng.uniform(0.01, 5.0, samples)
        f1, f2 = F(u[:, 0], a, k), F(u[:, 1], a, k)
        bad = f2 < f1 - 1e-12 * np.abs(f1)
        entry = {"passed": not bool(bad.any()), "samples": samples}
        if bad.any():
            i = int(np.argmax(bad))
            entry["violation"] = {"u1": float(u[i, 0]), "u2": float(u[i, 1]), "a": float(a[i]),
                                  "k": float(k[i])}
        res[name] = entry
    return all(r["passed"] for r in res.values()), res


def check_ab_sandwich(samples=10_000, seed=2):
    rng = np.random.default_rng(seed)
    u = 10.0 ** rng.uniform(-4, 4, samples)
    u[: samples // 20] = 0.0
    a = 10.0 ** rng.uniform(-4, 4, samples)
    k = rng.uniform(0.05, 5.0, samples)
    mid = np.log(ab_middle(u, a, k))
    lo = -np.log1p(a)
    hi = k * np.log1p(a) - np.log(a)
    tol = 1e-12 * (1.0 + np.abs(mid))
    bad = (mid < lo - tol) | (mid > hi + tol)
    det = {"passed": not bool(bad.any()), "samples": samples,
           "min_gap_low": float(np.min(mid - lo)), "min_gap_high": float(np.min(hi - mid))}
    if bad.any():
        i = int(np.argmax(bad))
        det["violation"] = {"u": float(u[i]), "a": float(a[i]), "k": float(k[i])}
    return det["passed"], det


def fitted_log_constant(points):
    """Smallest C with |log(cosh t + r sinh t) - r t| <= C t^2 on a (t, r) grid."""
    t = np.linspace(0.0, 1.0, points)[1:]
    r = np.linspace(0.0, 1.0, points)
    T, R = np.meshgrid(t, r, indexing="ij")
    # log(cosh t + r sinh t) - r t = log((1+r) + (1-r) e^{-2t}) - log 2 + (1-r) t
    dev = np.log((1 + R) + (1 - R) * np.exp(-2 * T)) - math.log(2.0) + (1 - R) * T
    return float(np.max(np.abs(dev) / T ** 2))


def check_log_lemma(points=41, rel=0.05):
    c0, c1 = fitted_log_constant(points), fitted_log_constant(2 * points - 1)
    ok = math.isfinite(c1) and abs(c1 - c0) <= rel * max(c0, c1)
    return ok, {"passed": ok, "C": [c0, c1]}


def check_region_asymptotes(points=25, ks=LEMMA_KS, rel=0.05):
    """f_alpha over its regional asymptote stays in a fixed positive band."""
    res = {}
    for k in ks:
        spreads = []
        for p in (points, 2 * points - 1):
            g = _log_grid(1e-3, 1e3, p)
            vals = np.array([log_f_alpha(al, ax, k) - log_region_asymptote(al, ax, k) for al in g for ax in g])
            spreads.append(float(vals.max() - vals.min()))
        ok = bool(np.isfinite(spreads).all() and abs(spreads[1] - spreads[0]) <= rel * max(spreads) + 1e-12)
        res[str(k)] = {"passed": ok, "log_spread": spreads}
    return all(r["passed"] for r in res.values()), res


LEMMA_CHECKS = {
    "lemma_a": check_lemma_a,
    "lemma_b": check_lemma_b,
    "monotone": check_monotone,
    "ab_sandwich": check_ab_sandwich,
    "log_quadratic": check_log_lemma,
    "region_asymptotes": check_region_asymptotes,
}


def run_lemma_suite(out_path=None, fmt="json"):
    """Run every lemma check; returns ``{"passed": bool, "checks": {...}}``."""
    checks = {}
    for name, fn in LEMMA_CHECKS.items():
        ok, detail = fn()
        checks[name] = {"passed": bool(ok), "detail": detail}
    summary = {"passed": all(c["passed"] for c in checks.values()), "checks": checks}
    if out_path is not None:
        emit_report(summary, fmt, out_path)
    return summary


# ------------------------------------------------------------------ output

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def report_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in sorted(report.points, key=_sort_key):
        w.writerow([_fmt(v) for v in (report.system, report.n, float(report.k1), float(report.k2),
                                      p.region, p.alpha_lambda, p.alpha_x, p.log_phi,
                                      p.log_estimate, p.log_ratio, p.converged)])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, RatioReport):
        d = asdict(obj)
        d["points"] = sorted(d["points"], key=lambda p: (p["region"], p["alpha_lambda"], p["alpha_x"]))
        return d
    return obj


def emit_report(report, fmt, path):
    """Write a RatioReport (CSV or JSON) or a lemma summary (JSON or CSV) to ``path``."""
    fmt = str(getattr(fmt, "value", fmt)).lower()
    if fmt == "csv":
        if isinstance(report, RatioReport):
            text = report_csv(report)
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(("check", "passed"))
            for name, c in report["checks"].items():
                w.writerow((name, _fmt(bool(c["passed"]))))
            text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    else:
        raise DomainError(f"unknown report format {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
