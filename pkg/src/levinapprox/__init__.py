"""Gap-aware distances, slit conformal maps and approximation by entire functions on finite-gap subsets of the real line."""
from .bandlimited import (KernelApproximant, RateReport, SincApproximant, extend_linear,
                          kernel_approximant, kernel_constant, kernel_error, kernel_value,
                          minimax_approx, rate_fit)
from .experiments import ExperimentConfig, run_lemma36, run_rates, run_theorem1
from .functions import SampledFunction, abs_pow, parse_function, rho_pow, tau_pow
from .levinmap import LevinMap, solve_parameters
from .realset import (GeometryReport, RealLineSet, example1, example2, four_gap, gap_free,
                      single_gap, tilde_gap, validate_geometry)
from .taumetric import PowerModulus, TabulatedModulus, omega_majorant, omega_star, tau

__version__ = "0.1.0"
