"""Deterministic entropy-preserving partial Hadamard measurement matrices.

For an i.i.d. integer source, the rows of the signed Hadamard family whose
synthesized conditional entropy exceeds a threshold form a deterministic
measurement matrix that preserves all but a vanishing fraction of the source
entropy.  This package computes those entropies (exactly at small depth, by
Monte Carlo at scale), selects and exports the rows, verifies the underlying
entropy-gap inequality for self-convolutions, and simulates encoding and
successive-cancellation decoding with and without Gaussian measurement noise.
"""

from .zdist import (InvalidCutError, SplitResult, ZDist, binary_entropy,
                    convolve, entropy, kl_divergence, l1_distance, prune,
                    reflect, split)
from .epi import (GAP_LIMIT, EpiCheck, EpiGapPoint, epi_curve, gap_function_g,
                  gap_function_t, lemma2_bound, quartic_bound, verify_epi)
from .transform import (BitPath, TransformPlan, apply_fast, apply_naive,
                        bit_path, build_matrix, gram, hadamard_row, invert)
from .construct import (AbsorptionPoint, BudgetError, ExactEntropies,
                        InconsistentEvidenceError, MartingaleReport,
                        McEntropies, NestedReport, RowSelection, SynthSource,
                        absorption_trace, compute_entropies_exact, entropy_of,
                        estimate_entropies_mc, evolve_minus, evolve_plus,
                        export_matrix, martingale_check, nested_report,
                        sc_conditional_pmf, select_rows)
from .codec import (DecodeFailure, Measurement, SnrPoint, add_noise,
                    decode_ml_exhaustive, decode_sc, decode_sc_batch, encode,
                    map_logscore, rep_check, snr_sim)
from .quantize import (UniformQuantizer, dequantize, mmse, quantize,
                       rate_lower_bound)

__version__ = "0.1.0"
