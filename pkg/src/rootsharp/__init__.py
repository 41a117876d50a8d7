"""Heckman-Opdam hypergeometric functions for A_n and BC1 and numerical checks of
their sharp two-sided estimates."""
from .envelope import (RegionLabel, classify_region, f_alpha, log_estimate, log_f_alpha,
                       log_region_asymptote, region_closure, root_regions)
from .errors import (ConvergenceError, DegenerateParameterError, DepthError, DomainError,
                     PreconditionError, RootsharpError)
from .eval_an import (LogResult, complex_oracle_constant, complex_oracle_ratio, default_an_quad,
                      log_I_n, log_I_n_estimate, log_I_truncated, log_phi_an, phi_a1_closed_k1)
from .eval_bc1 import BC1Method, bc1_region_envelope, log_phi_bc1
from .quadrature import QuadratureSpec, QuadResult, Rule1D, gauss_jacobi_rule, integrate_1d
from .rootcore import (RootFunctional, RootKind, RootSystemSpec, log_products, positive_roots,
                       rho, root_values)
from .specfun import (HypRegime, gauss_2f1, lemma_b_integral, log_gamma, log_gauss_2f1,
                      lower_gamma)
from .verify import (RatioReport, SweepConfig, emit_report, run_conjecture_sweep,
                     run_lemma_suite)

__version__ = "0.1.0"
