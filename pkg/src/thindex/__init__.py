"""Fredholm property and index of Toeplitz plus Hankel operators on l^p."""

from .algebra import (COMPACT, FredholmVerdict, Generator, MatrixGenerator, OperatorExpr,
                      Resolution, H, T, TH, compact, essential_spectrum_cloud, flip, identity,
                      is_fredholm, smb, smb_generator, smb_matrix_generator)
from .arcs import Exponent, conjugate_exponent, lambda_grid, mu, nu
from .extension import (GeneratorMatrix, el, ext, ext_factors, ext_matrix_generator,
                        extension_equivalence_check, index_el_ext, reduced_toeplitz_index,
                        verify_extension_factorization)
from .index import (IndexReport, JunctionError, NotFredholmError, OrientedCurve, W_values,
                    argument_growth, matrix_op_curve, toeplitz_circle_curve,
                    build_W, doubled_matrix_of, index_TH, index_matrix_op,
                    index_toeplitz_circle, separate_jumps, winding)
from .multiplier import MultiplierOverflowError, PCMultiplier
from .oracle import (BandedSpec, OracleError, hankel_entry, product_identity_check,
                     laurent_index_oracle, laurent_kernel_oracle,
                     rank_deficiency, toeplitz_entry, truncate)

__all__ = [
    "COMPACT", "FredholmVerdict", "Generator", "MatrixGenerator", "OperatorExpr", "Resolution",
    "H", "T", "TH", "compact", "essential_spectrum_cloud", "flip", "identity", "is_fredholm",
    "smb", "smb_generator", "smb_matrix_generator",
    "Exponent", "conjugate_exponent", "lambda_grid", "mu", "nu",
    "GeneratorMatrix", "el", "ext", "ext_factors", "ext_matrix_generator",
    "extension_equivalence_check", "index_el_ext", "reduced_toeplitz_index",
    "verify_extension_factorization",
    "IndexReport", "JunctionError", "NotFredholmError", "OrientedCurve", "W_values", "build_W",
    "doubled_matrix_of", "index_TH", "index_matrix_op", "index_toeplitz_circle",
    "separate_jumps", "winding", "argument_growth", "matrix_op_curve", "toeplitz_circle_curve",
    "MultiplierOverflowError", "PCMultiplier",
    "BandedSpec", "OracleError", "hankel_entry", "product_identity_check", "laurent_index_oracle",
    "laurent_kernel_oracle",
    "rank_deficiency", "toeplitz_entry", "truncate",
]
