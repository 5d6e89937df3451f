"""Convergence classification and center-series acceleration for DP Fourier series."""

from .center import (CenterFactorization, CenterPolynomial, build_polynomial, factor,
                     factor_iterated, monotone_center_bound)
from .coeffs import (CoefficientSequence, DecayFit, fit_decay, log_derivative, log_integral,
                     ratio_radius)
from .corpus import CORPUS, CorpusEntry, get_entry, verify_entry
from .evaluation import (EvalQuery, EvaluationReport, abel_limit, dirichlet_disk,
                         dirichlet_partial_sums, eval_center, eval_direct,
                         pole_prefactor_closed_form)
from .exact import Angle, PiMultiple
from .singularity import (ConvergenceClass, Degree, SingularityPoint, SingularitySet,
                          check_absolute_convergence, classify, classify_sequence, detect_dominant,
                          shift_degrees, superpose)

__all__ = [
    "Angle", "CORPUS", "CenterFactorization", "CenterPolynomial", "CoefficientSequence",
    "ConvergenceClass", "CorpusEntry", "DecayFit", "Degree", "EvalQuery", "EvaluationReport",
    "PiMultiple", "SingularityPoint", "SingularitySet", "abel_limit", "build_polynomial",
    "check_absolute_convergence", "classify", "classify_sequence", "detect_dominant", "dirichlet_disk",
    "dirichlet_partial_sums", "eval_center", "eval_direct", "factor", "factor_iterated",
    "fit_decay", "get_entry", "log_derivative", "log_integral", "monotone_center_bound",
    "pole_prefactor_closed_form", "ratio_radius", "shift_degrees", "superpose", "verify_entry",
]
