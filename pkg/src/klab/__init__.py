"""Numerical laboratory for Kondratiev spaces and refined localization
Triebel-Lizorkin spaces on domains with singular sets."""

from .errors import (KlabError, SingularPoint, OutsideCover, CoverageGap,
                     InvalidParams, Unsupported, EmptyFamily,
                     UndeterminedByPaper)
from .geometry import (ModelDomain, PolygonSingularSet, DyadicCube,
                       WhitneyCover, PartitionOfUnity, whitney_cover,
                       partition_of_unity, regularized_distance,
                       distance_to_singular_set)
from .testfns import (TestFunction, MembershipVerdict, make_test_function,
                      kondratiev_membership, f_space_membership_radial)
from .norms import (SpaceParams, NormValue, kondratiev_norm, sobolev_norm,
                    kondratiev_sharp_norm, rloc_norm_localized,
                    rloc_norm_weighted, weighted_lp_norm,
                    multiply_by_rho_power, classify_radial_integral,
                    radial_reference_integral, FINITE, DIVERGENT,
                    INCONCLUSIVE)
from .wavelets import (WaveletSystem, CoefficientGrid, daubechies_filter,
                       build_wavelet_system, wavelet_coefficients,
                       f_sequence_norm, synthesize)
from .embeddings import (Verdict, HolderRoute, decide_embedding,
                         decide_embedding_holder_route,
                         decide_reverse_embedding, pde_regularity_tau,
                         adaptivity_scale, technical_threshold_a, sigma,
                         HOLDS, FAILS, UNDETERMINED)

__version__ = "0.1.0"
