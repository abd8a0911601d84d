"""Simulation and Monte Carlo verification of functional limit theorems for Levy processes."""
__version__ = "0.1.0"

from .errors import (ConfigError, DegenerateTailError, HorizonError, InvalidTripletError, LevyLimitError,
                     NoNormingError, QuadratureError, SamplingError)
from .laws import Atoms, DoubleExponential, Normal, ParetoTails, Shifted
from .levy_core import (AttractionReport, LevyTriplet, check_attraction_stable, check_gaussian_domain,
                        check_integrability, check_normal_attraction, eval_char_fn)
from .levy_sim import sample_compound_poisson, sample_levy_path, sample_stable_increment
from .paths import CadlagPath
from .rescale import (GaussianTarget, NormingPlan, compute_centering_bn, compute_centering_gaussian, derive_norming,
                      rescale_path)
from .rng import RngStream
from .skorohod import TimeWarp, metric_j1, metric_rho0, metric_rho1, oscillation_tail
from .stable import StableParams
from .stattest import WeightedSample, cf_distance, cvm_distance, ks_distance, stable_cdf
from .asclt import (LogAvgMeasure, asclt_distance, build_log_average, check_condition_A, coupling_decay,
                    estimate_lemma1_constants)
from .tails import CallableTails, CompoundPoissonTails, NoJumps, StableTails, TabulatedTails

__all__ = [
    "AttractionReport", "Atoms", "CadlagPath", "CallableTails", "CompoundPoissonTails", "ConfigError",
    "DegenerateTailError", "DoubleExponential", "GaussianTarget", "HorizonError", "InvalidTripletError",
    "LevyLimitError", "LevyTriplet", "LogAvgMeasure", "NoJumps", "NoNormingError", "Normal", "NormingPlan",
    "ParetoTails", "QuadratureError", "RngStream", "SamplingError", "Shifted", "StableParams", "StableTails",
    "TabulatedTails", "TimeWarp", "WeightedSample", "asclt_distance", "build_log_average", "cf_distance",
    "check_attraction_stable", "check_condition_A", "check_gaussian_domain", "check_integrability",
    "check_normal_attraction", "compute_centering_bn", "compute_centering_gaussian", "coupling_decay",
    "cvm_distance", "derive_norming", "estimate_lemma1_constants", "eval_char_fn", "ks_distance", "metric_j1",
    "metric_rho0", "metric_rho1", "oscillation_tail", "rescale_path", "sample_compound_poisson",
    "sample_levy_path", "sample_stable_increment", "stable_cdf",
]
