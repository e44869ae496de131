"""Distributed graph signal processing with shifted Chebyshev polynomials.

Graph multiplier operators ``g(L)`` (and unions of them) are replaced by
order-``K`` Chebyshev expansions, which a sensor network can apply with
``K`` rounds of neighbor-to-neighbor messages.  The package provides the
graph models, an exact spectral oracle, the approximation itself, a
message-passing simulator and the applications built on top (denoising,
wavelet lasso, deblurring, semi-supervised classification) together with
Jacobi-type baselines.
"""

from ._version import __version__
from .graph import (WeightedGraph, build_geometric_graph, geometric_graph_from_coords, gershgorin_bound,
                    is_connected, lambda_max_bound, laplacian, load_graph, load_signal, normalized_laplacian,
                    save_graph, save_signal, smoothness)
from .spectral import (Multiplier, MultiplierUnion, SpectralDecomposition, adjoint_union_exact,
                       apply_multiplier_exact, apply_union_exact, commutes, eigendecompose, gft, igft,
                       operator_matrix, oracle_cap)
from .chebyshev import (ChebyshevApprox, GramCoefficients, apply_adjoint_approx, apply_approx,
                        apply_gram_approx, approx_operator_matrix, chebyshev_coefficients, chebyshev_eval,
                        gram_coefficients, load_coefficients, residual_sup, save_coefficients,
                        verify_spectral_bound)
from .distsim import (RoundTrace, SimState, export_trace, init_network, message_summary, run_adjoint,
                      run_forward, run_gram)
from .filters import heat_multiplier, inverse_filter_multiplier, naive_inverse_multiplier, tikhonov_multiplier
from .wavelets import WaveletFrame, abspline_kernel, frame_bounds, sgwt_frame, sgwt_scales
from .denoising import (LassoConfig, LassoResult, denoise_tikhonov, distributed_filter, distributed_lasso,
                        inverse_filter, ista, sgwt_weights, soft_threshold, verify_lasso_bound)
from .ssl import (KERNEL_KINDS, LabelMatrix, SSLKernel, SSLResult, load_labels, save_labels, ssl_centralized,
                  ssl_classify, ssl_kernel)
from .jacobi import (ComparisonCurves, JacobiSystem, build_jacobi_system, convergence_compare,
                     jacobi_cheb_accelerated, jacobi_iterate, multiplier_jacobi_system, save_curves,
                     spectral_radius_iteration, xi_sequence)
