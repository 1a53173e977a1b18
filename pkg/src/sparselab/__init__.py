"""Numerical laboratory for sparse domination of discrete singular integrals.

Modules
-------
grid
    Signals on the integers, shifted dyadic grids, local averages.
sparse
    Sparse collections, the sparse bilinear form, domination experiments.
weights
    Muckenhoupt and reverse Holder characteristics on finite cube families.
randsing
    Discrete Hilbert transform, its random fractional variants, and the
    scale-block decomposition with multiplier operator norms.
oscillatory
    Single-scale oscillatory integral pieces with polynomial phases.
interp
    Exponent calculus tying the two-endpoint scale bounds together.
cli
    Command line experiment runner (``sparselab <experiment> ...``).
"""

__version__ = "0.1.0"

from .grid import (
    DyadicCube,
    GridWindow,
    Signal,
    bilinear_pairing,
    local_average,
    shifted_grid_cubes,
    smallest_containing_cube,
)
from .interp import (
    EndpointPair,
    critical_index,
    gain_exponent,
    random_model_endpoints,
    weighted_exponents,
)
from .oscillatory import (
    LocalizedPiece,
    PolynomialPhase,
    iq_adjoint_apply,
    iq_apply,
    iq_l2_norm,
    normalize_phase,
    radial_bump,
    smooth_step,
)
from .randsing import (
    RandomSet,
    ScaleBlock,
    hilbert_transform,
    opnorm_multiplier,
    random_hilbert,
    random_maximal,
    sample_random_set,
    scale_block_apply,
)
from .sparse import (
    SparseCollection,
    SparseFormParams,
    build_sparse_collection,
    domination_ratio,
    sparse_form,
    verify_sparsity,
)
from .weights import (
    Weight,
    ap_characteristic,
    check_ww_conditions,
    default_family,
    dual_weight,
    power_weight,
    reverse_holder_scan,
    rh_characteristic,
    weighted_lp_norm,
)
