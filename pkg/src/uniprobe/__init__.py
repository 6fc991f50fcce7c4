"""Single-shot distinguishability of unitary channels by probe class."""

from .discrimination import (
    Certificate,
    DiscriminationOutcome,
    Povm,
    StateEnsemble,
    discriminate_optimal,
    helstrom_two,
    sample_trials,
    square_root_measurement,
    verify_certificate,
)
from .families import (
    ARBITRARY,
    MAX_ENTANGLED,
    PRODUCT,
    ProbeSpec,
    UnitaryEnsemble,
    probe_max_entangled,
    probe_v_family,
    probe_w_family,
    swapped_pair,
    t_trio,
    v_family,
    w_family,
)
from .hullgeom import HullResult, min_hull_norm, origin_in_hull
from .pairwise import (
    PairReport,
    RelativeSpectrum,
    d_maxent,
    d_product,
    d_with_probe,
    nme_advantage_check,
    optimal_entangled_probe,
    pair_inner_product,
    pair_report,
    phase_weights,
    relative_spectrum,
)
from .probeopt import (
    CommonProbeResult,
    PreconditionError,
    ProbeOptResult,
    SeesawConfig,
    TableRow,
    common_probe_search,
    evaluate,
    evolve,
    optimize,
    qubit_common_me_check,
    table_v,
    table_w,
)
from .qlinalg import (
    PureState,
    SchmidtDecomposition,
    adjoint,
    eig_normal,
    haar_state,
    haar_unitary,
    multiply,
    schmidt,
    tensor,
    trace_norm,
)

__version__ = "0.1.0"
