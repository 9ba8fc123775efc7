"""Numerical laboratory for approximate universal programmable quantum
processors: explicit constructions, diamond-norm programming errors, and the
Banach-space embedding view with its memory-size certificates."""

from . import banach, bounds, distances, linalg, processors, quantum, sdp
from .banach import (
    EmbeddingMap,
    EmbeddingReport,
    MemoryWitness,
    TypeEstimate,
    cb_norm,
    distortion,
    embedding_map,
    memory_lower_bound_witness,
    rademacher_average,
    theorem3_memory_lower_bound,
    type2_upper_bound_operator_norm,
)
from .bounds import BoundConstants, BoundsRow, bounds_table, corollary_epsilon_floor
from .distances import (
    DistanceReport,
    diamond_distance,
    distinguish_probability,
    fidelity,
    fvdg_check,
    trace_distance,
    unitary_diamond_distance,
)
from .processors import (
    ProgrammingErrorReport,
    SynthesisResult,
    UnitaryNet,
    best_program_state,
    build_controlled_processor,
    build_epsilon_net,
    build_teleportation_processor,
    certified_best_program_error,
    net_programming_error,
    programming_error,
    russo_dye_decompose,
    synthesize_processor,
    synthesized_program,
    teleportation_program,
)
from .quantum import (
    Channel,
    ProgramState,
    Processor,
    apply_channel,
    choi_matrix,
    depolarizing_channel,
    identity_channel,
    induced_program_channel,
    stinespring_dilation,
    unitary_channel,
    unitary_processor,
)
from .sdp import SdpProblem, SdpSolution, solve

__version__ = "0.1.0"
