"""Bayesian, maximum-entropy and tomographic reconstruction of qubit states."""
__version__ = "0.1.0"

from .linalg import (bloch_from_density, density_from_bloch, eig_hermitian, partial_trace_second, pauli,
                     tensor_product, trace_distance, von_neumann_entropy)
from .states import PurifiedParams, frame_vectors, measure_weight, pure_qubit_density, purified_density, sample_purified
from .measurement import (LEVEL_A, LEVEL_B, LEVEL_C, Dataset, Observable, ObservationLevel, born_probability,
                          empirical_frequencies, projector, simulate_outcomes)
from .bayes import (EmptyShellError, EstimateReport, McConfig, limit_estimator_exact, limit_estimator_kernel,
                    log_likelihood, posterior_mean_mixed, posterior_mean_pure)
from .maxent import Constraint, MaxEntSolution, check_consistency, maxent_general, maxent_qubit
from .lemma import LemmaParams, beta_ratio_identity, integral_I, log_F, log_norm_constant, simplex_moments
from .tomography import TomogramResult, linear_invert, tomography_equals_maxent
