"""Command line: ``rootsharp eval ...`` and ``rootsharp verify ...``.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 non-convergence.
"""
import argparse
import math
import sys

from .envelope import log_estimate, root_regions
from .errors import ConvergenceError, RootsharpError
from .eval_an import default_an_quad, log_phi_an
from .eval_bc1 import bc1_region_envelope, log_phi_bc1
from .quadrature import QuadratureSpec
from .rootcore import RootSystemSpec, positive_roots
from .verify import SweepConfig, emit_report, run_conjecture_sweep, run_lemma_suite

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _quad(args, base):
    nodes = args.nodes if args.nodes is not None else base.nodes_per_dim
    tol = args.tol if args.tol is not None else base.rel_tol
    return QuadratureSpec(nodes_per_dim=nodes, rel_tol=tol, max_refinements=base.max_refinements)


def _phi_text(log_phi):
    return repr(math.exp(log_phi)) if log_phi < 709.0 else "overflow"


def _print_result(res, est):
    print(f"log_phi      {res.value!r}")
    print(f"phi          {_phi_text(res.value)}")
    print(f"log_estimate {est!r}")
    print(f"log_ratio    {res.value - est!r}")
    print(f"converged    {res.converged}  error {res.error:.3e}  nodes {res.nodes}"
          + ("  regularized" if res.regularized else ""))


def cmd_eval_an(args):
    spec = RootSystemSpec.type_a(args.n, args.k)
    quad = _quad(args, default_an_quad(args.n))
    res = log_phi_an(args.lam, args.x, spec, quad, args.backend)
    est = log_estimate(spec, args.lam, args.x)
    _print_result(res, est)
    for root, region in zip(positive_roots(spec), root_regions(spec, args.lam, args.x)):
        i, j = root.label
        print(f"root e{i}-e{j}  alpha(lambda)={root(args.lam)!r}  alpha(X)={root(args.x)!r}  region {region.value}")
    return EXIT_OK if res.converged else EXIT_NONCONV


def cmd_eval_bc1(args):
    spec = RootSystemSpec.bc1(args.k1, args.k2)
    quad = _quad(args, QuadratureSpec())
    res = log_phi_bc1(args.lam, args.t, args.k1, args.k2, args.method, quad)
    est = log_estimate(spec, [args.lam], [args.t])
    _print_result(res, est)
    region, _ = bc1_region_envelope(args.lam, args.t, args.k1, args.k2)
    print(f"region       {region.value}")
    return EXIT_OK if res.converged else EXIT_NONCONV


def cmd_verify_conjecture(args):
    if args.system == "an":
        spec = RootSystemSpec.type_a(args.n, args.k)
        base = default_an_quad(args.n)
    else:
        spec = RootSystemSpec.bc1(args.k1, args.k2)
        base = QuadratureSpec()
    cfg = SweepConfig(spec, args.grid_lo, args.grid_hi, args.points, _quad(args, base),
                      args.seed, args.workers, args.backend)
    report = run_conjecture_sweep(cfg)
    emit_report(report, args.format, args.out)
    ok = True
    for lab, st in sorted(report.regions.items()):
        finite = math.isfinite(st.min_log_ratio) and math.isfinite(st.max_log_ratio)
        ok &= finite
        print(f"region {lab:>3}  count {st.count:5d}  log-ratio [{st.min_log_ratio:.6g}, "
              f"{st.max_log_ratio:.6g}]  spread {st.spread:.6g}")
    print(f"unconverged {report.unconverged}  written {args.out}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_verify_lemmas(args):
    summary = run_lemma_suite(args.out, args.format)
    for name, c in summary["checks"].items():
        print(f"{name:18s} {'pass' if c['passed'] else 'FAIL'}")
        if not c["passed"]:
            print(f"  {c['detail']}")
    return EXIT_OK if summary["passed"] else EXIT_CHECK


def build_parser():
    p = _Parser(prog="rootsharp", description="Hypergeometric functions for A_n and BC1 and their sharp estimates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="evaluate one phi_lambda(e^X)")
    evs = ev.add_subparsers(dest="system", required=True, parser_class=_Parser)
    an = evs.add_parser("an")
    an.add_argument("--n", type=int, required=True)
    an.add_argument("--k", type=float, required=True)
    an.add_argument("--lambda", dest="lam", type=_csv_floats, required=True)
    an.add_argument("--x", type=_csv_floats, required=True)
    an.add_argument("--nodes", type=int)
    an.add_argument("--tol", type=float)
    an.add_argument("--backend", choices=("numba", "numpy"))
    an.set_defaults(func=cmd_eval_an)

    bc = evs.add_parser("bc1")
    bc.add_argument("--k1", type=float, required=True)
    bc.add_argument("--k2", type=float, required=True)
    bc.add_argument("--lambda", dest="lam", type=float, required=True)
    bc.add_argument("--t", type=float, required=True)
    bc.add_argument("--method", choices=("hyp", "integral"), default="hyp")
    bc.add_argument("--nodes", type=int)
    bc.add_argument("--tol", type=float)
    bc.set_defaults(func=cmd_eval_bc1)

    ver = sub.add_parser("verify", help="grid sweeps and lemma checks")
    vs = ver.add_subparsers(dest="what", required=True, parser_class=_Parser)
    cj = vs.add_parser("conjecture")
    cj.add_argument("--system", choices=("an", "bc1"), required=True)
    cj.add_argument("--n", type=int, default=1)
    cj.add_argument("--k", type=float, default=1.0)
    cj.add_argument("--k1", type=float, default=1.0)
    cj.add_argument("--k2", type=float, default=0.5)
    cj.add_argument("--grid-lo", type=float, required=True)
    cj.add_argument("--grid-hi", type=float, required=True)
    cj.add_argument("--points", type=int, required=True)
    cj.add_argument("--seed", type=int, default=0)
    cj.add_argument("--out", required=True)
    cj.add_argument("--format", choices=("csv", "json"), default="csv")
    cj.add_argument("--nodes", type=int)
    cj.add_argument("--tol", type=float)
    cj.add_argument("--workers", type=int, default=1)
    cj.add_argument("--backend", choices=("numba", "numpy"))
    cj.set_defaults(func=cmd_verify_conjecture)

    lm = vs.add_parser("lemmas")
    lm.add_argument("--out", required=True)
    lm.add_argument("--format", choices=("csv", "json"), default="json")
    lm.set_defaults(func=cmd_verify_lemmas)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"rootsharp: not converged: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (RootsharpError, ValueError, RuntimeError) as exc:
        print(f"rootsharp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        # an unwritable --out path is an invocation problem
        print(f"rootsharp: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
