"""Jacobi-weighted polynomial approximation toolkit.

Weighted L_p norms with Jacobi weights, the phi-variable-step moduli of
smoothness and their averaged variants, best-approximation errors E_n in
all four p-regimes, and a harness that empirically verifies the direct,
inverse, Whitney-type, Bernstein, and sharp Marchaud/Jackson inequalities
on a test-function corpus.
"""

from .bestapprox import (ApproxResult, Polynomial, bernstein_ratio, best_approx,
                         best_approx_l2, best_approx_lp, best_approx_minimax,
                         best_approx_quasi, chebyshev_t, local_best_approx)
from .exceptions import (ConvergenceError, DomainError, JacobiApproxError,
                         ParameterError, PreconditionError, SolverStallError)
from .functions import FunctionSpec, certify_class, corpus_by_name, corpus_catalog
from .harness import (DecayProfile, ErrorSequence, InequalityReport,
                      compute_error_sequence, fit_decay, verify_appendix,
                      verify_direct, verify_inverse, verify_inverse_smallp,
                      verify_whitney)
from .moduli import (ModulusQuery, ModulusResult, averaged_modulus,
                     symmetric_difference, weighted_modulus)
from .quadrature import (NormResult, QuadratureRule, gauss_jacobi_rule,
                         integrate_weighted, weighted_lp_norm, weighted_sup_norm)
from .weights import (DomInterval, HattedWeightParams, WeightParams,
                      dom_interval, eval_hatted_weight, eval_weight, mu, phi,
                      solve_y, y_shifted)

__version__ = "0.1.0"
