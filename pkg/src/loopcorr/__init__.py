"""Loop-series corrections to the Bethe free energy of LDPC codes.

Exact desk-scale machinery for the loop/polymer expansion of the
log-partition function of regular LDPC codes on a binary symmetric
channel: graph ensembles and expansion checks, BP fixed points, the Bethe
free energy, brute-force ground truth, generalized-loop activities, and
the cluster expansion of the small-polymer partition function.
"""

from ._kernels import backend_name
from .bethe import bethe_free_energy, check_term, edge_term, variable_term
from .bp import BPResult, MessageSet, bp_solve, bp_update, check_high_noise, update_residual
from .channel import ChannelRealization, enumerate_outputs, half_llr, sample_bsc
from .exact import (
    CodewordBasis,
    codeword_basis,
    conditional_entropy_direct,
    conditional_entropy_exact,
    log_partition,
)
from .loops import (
    GeneralizedLoop,
    LoopIdentityReport,
    check_activity,
    enumerate_generalized_loops,
    loop_series_sum,
    loop_weight,
    verify_loop_identity,
    vertex_activity,
)
from .polymer import (
    BoundConstants,
    Polymer,
    PolymerType,
    activity_bound,
    brydges_criterion,
    check_polymer_bound,
    decompose,
    enumerate_small_polymers,
    exponent_c,
    large_polymer_remainder,
    mayer_truncated,
    polymer_type,
    small_polymer_partition,
    type_census,
)
from .tanner import (
    BipartiteGraph,
    TannerGraph,
    expansion_threshold,
    generate_regular,
    gf2_nullspace,
    gf2_rank,
    is_expander,
    load_alist,
    parity_check_matrix,
    save_alist,
)

__version__ = "0.1.0"
