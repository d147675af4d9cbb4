"""Weak approximation for systems of rational quadratic forms.

Exact arithmetic throughout; floating point only proposes, and every
claimed point is re-verified over the rationals.
"""

from .admissibility import (AdmissCert, Thresholds, certify_real, generate_admissible,
                            lemma3_check, min_rank_complex, thresholds)
from .engine import Problem, Solution, plant_instance, solve, verify
from .errors import (DegenerateChart, HeightBoundExceeded, HenselConditionFailed,
                     InconsistentTarget, MathFailure, MaxIterationsExceeded, NotAdmissible,
                     NotGloballySoluble, PrecisionExhausted, RestrictionNotInjective)
from .forms import (FormSystem, QForm, Subspace, diagonalize, evaluate, inertia, kernel, rank,
                    restrict, restrict_system)
from .hilbert import hasse_invariant, hilbert_symbol
from .isotropic import find_isotropic, is_locally_isotropic, nonsingular_isotropic, represent_value
from .local_solver import solve_sign_pattern, solve_values
from .nt import INF
from .quadric_wa import (LocalTarget, approximate_on_quadric, parametrize, proj_distance,
                         simultaneous_approx, simultaneous_approx_vector, unparametrize)

__version__ = "0.1.0"

__all__ = [
    "AdmissCert", "Thresholds", "certify_real", "generate_admissible", "lemma3_check",
    "min_rank_complex", "thresholds", "Problem", "Solution", "plant_instance", "solve", "verify",
    "DegenerateChart", "HeightBoundExceeded", "HenselConditionFailed", "InconsistentTarget",
    "MathFailure", "MaxIterationsExceeded", "NotAdmissible", "NotGloballySoluble",
    "PrecisionExhausted", "RestrictionNotInjective", "FormSystem", "QForm", "Subspace",
    "diagonalize", "evaluate", "inertia", "kernel", "rank", "restrict", "restrict_system",
    "hasse_invariant", "hilbert_symbol", "find_isotropic", "is_locally_isotropic",
    "nonsingular_isotropic", "represent_value", "solve_sign_pattern", "solve_values", "INF",
    "LocalTarget", "approximate_on_quadric", "parametrize", "proj_distance",
    "simultaneous_approx", "simultaneous_approx_vector", "unparametrize",
]
