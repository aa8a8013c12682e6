# Some notes about the naming conventions and the relationship between various
# similar-but-different names.
#
# import pydyadic
#     the user-facing API. Everything an experiment needs should be made
#     available here (i.e., this file). The functions paraproduct.paraproduct
#     and storage.storage are not re-exported, so pydyadic.paraproduct and
#     pydyadic.storage stay the modules.
#
# pydyadic.grid
#     internal array kernels over the cells of a window. They know nothing
#     about intervals or step functions, only about levels of numpy arrays
#     laid out left to right. End users should not need them.
#
# window, (root, min_scale)
#     the Haar functions h_I for I inside root with scale(I) >= min_scale.
#     Functions on a window are constant on cells of width 2**(min_scale - 1);
#     the Haar shift of such a function is one scale finer again.
#
# depth
#     root.scale - min_scale, so a window of depth d has d + 1 levels.
#
# h0, h1, g
#     the Haar function, the normalized indicator and the shifted Haar
#     function with quarters (-, +, +, -).

from pydyadic.calibration import KAPPA, TILDE_ALPHA, TILDE_C
from pydyadic.config import ConfigError, RunConfig, build_config
from pydyadic.display import display, render
from pydyadic.dyadic import (
    G,
    H0,
    H1,
    UNIT,
    DyadicInterval,
    HaarExpansion,
    PiecewiseConstant,
    analyze,
    average,
    avg_via_haar,
    bmo_norm,
    dilate,
    dyadic_maximal,
    gram_matrix,
    haar_function,
    haar_system,
    inner_product,
    lp_norm,
    random_expansion,
    random_step_function,
    synthesize,
    translate,
)
from pydyadic.hankel import (
    SpectralPolynomial,
    block_identity_residuals,
    commutator_identity_check,
    hankel_apply,
    hankel_matrix,
    hankel_norm,
    hilbert_alg,
    nehari_inf_estimate,
    nehari_lower_bound,
    nehari_report,
)
from pydyadic.hilbert import (
    LIMIT_CONSTANT,
    AveragingConfig,
    PiecewiseLinear,
    averaged_shift,
    averaged_shift_values,
    fit_constant,
    gamma0,
    gamma_sum,
    hilbert_pv,
    hilbert_truncated,
)
from pydyadic.paraproduct import (
    Signature,
    embedding_ensemble,
    embedding_report,
    holder_estimate,
    maximal_ensemble,
    product_decomposition,
    product_decomposition_general,
    stopping_decomposition,
    tilde_paraproduct,
)
from pydyadic.power import ConvergenceError, power_iteration
from pydyadic.shift import (
    commutator_adjoint,
    commutator_decomposed,
    commutator_direct,
    commutator_ensemble,
    commutator_norm_vs_bmo,
    haar_shift,
    haar_shift_coeffs,
)
from pydyadic.storage import Storage, from_json, to_json

__all__ = [
    "AveragingConfig",
    "ConfigError",
    "ConvergenceError",
    "DyadicInterval",
    "G",
    "H0",
    "H1",
    "HaarExpansion",
    "KAPPA",
    "LIMIT_CONSTANT",
    "PiecewiseConstant",
    "PiecewiseLinear",
    "RunConfig",
    "Signature",
    "SpectralPolynomial",
    "Storage",
    "TILDE_ALPHA",
    "TILDE_C",
    "UNIT",
    "analyze",
    "average",
    "averaged_shift",
    "averaged_shift_values",
    "avg_via_haar",
    "block_identity_residuals",
    "bmo_norm",
    "build_config",
    "commutator_adjoint",
    "commutator_decomposed",
    "commutator_direct",
    "commutator_ensemble",
    "commutator_identity_check",
    "commutator_norm_vs_bmo",
    "dilate",
    "display",
    "dyadic_maximal",
    "embedding_ensemble",
    "embedding_report",
    "fit_constant",
    "from_json",
    "gamma0",
    "gamma_sum",
    "gram_matrix",
    "haar_function",
    "haar_shift",
    "haar_shift_coeffs",
    "haar_system",
    "hankel_apply",
    "hankel_matrix",
    "hankel_norm",
    "hilbert_alg",
    "hilbert_pv",
    "hilbert_truncated",
    "holder_estimate",
    "inner_product",
    "lp_norm",
    "maximal_ensemble",
    "nehari_inf_estimate",
    "nehari_lower_bound",
    "nehari_report",
    "power_iteration",
    "product_decomposition",
    "product_decomposition_general",
    "random_expansion",
    "random_step_function",
    "render",
    "stopping_decomposition",
    "synthesize",
    "tilde_paraproduct",
    "to_json",
    "translate",
]
