"""Wavelet density estimation for samples from dependent random fields on lattices."""

from .besov import (BesovParams, RateParams, besov_seq_norm, differentiable_level,
                    holder_embedding_s, linear_level, rate_params)
from .errors import (DegenerateEstimateError, DegenerateSplitError, HypothesisError,
                     InadmissibleEtaError, InvalidShapeError, SampleParseError,
                     UnsupportedError, WaveDensError)
from .estimators import (CoefArray, Decomposition, DensityEstimate, empirical_father_coeffs,
                         empirical_level, empirical_mother_coeffs, evaluate, evaluate_grid,
                         hard_threshold_estimate, linear_estimate, relative_hard_estimate,
                         relative_thresholds, soft_threshold_estimate)
from .gmrf import (PAPER_ETA, admissible_eta_range, conditional_variances, make_multifield,
                   run_chain, simulate_target, target_l2_norm_sq, target_pdf)
from .lattice import (LatticeShape, build_index_set, concliques, four_neighbors,
                      partition_train_validate)
from .postprocess import (NormalizedEstimate, QuadratureGrid, VerReport, ise, l2_norm_sq,
                          normalize, select_primary_level, ver_exact, ver_hat)
from .wavelets import FILTERS, DilationMatrix, FilterBank, WaveletBasis, tensor_basis

__version__ = "0.1.0"
