"""Doubly nonnegative and completely positive cone membership for Choi matrices."""

from .choi import (
    BlockForm,
    ChoiMatrix,
    block,
    check_trace_conditions,
    choi_from_blocks,
    choi_from_kraus,
    from_block_form,
    interleave_to_block_perm,
    to_block_form,
)
from .classify import (
    ClassificationReport,
    CpStatus,
    classify_channel,
    qubit_output_pipeline,
    refute_cp,
)
from .cpfact import (
    CpCertificate,
    FactorOutcome,
    FactorParams,
    Status,
    factor_alternating_projection,
    factor_auto,
    factor_bipartite_blockform,
    factor_diag_dominant,
    factor_forest,
    map_certificate_diag,
    map_certificate_perm,
    verify_certificate,
)
from .graph import SupportGraph, TwoColoring, connected_components, is_forest, support_graph, to_dot, two_coloring
from .matcore import (
    DnnReport,
    SymMatrix,
    ToleranceConfig,
    diag_congruence,
    is_dnn,
    is_psd,
    min_eigenvalue,
    permute_congruence,
    sym_from_entries,
)
from .sampler import (
    SampleParams,
    derive,
    sample_blockform_channel,
    sample_cp,
    sample_dnn,
    sample_forest_dnn,
    sample_kraus_channel,
)

__version__ = "0.1.0"
