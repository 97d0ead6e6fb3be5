"""Moments and cumulants of Wishart/Wigner trace words.

The engine sums over pairings of the word's letters: each pairing glues
the trace factors into a surface whose particular vertex cycles dictate
a product of traces of the constant matrices, weighted by q^crossings
and family inner products, with a global N^(-m/2 - r) prefactor.  Two
independent oracles (a brute-force Wick index sum and a Monte Carlo
sampler) back every number the engine produces.
"""

from .engine import (
    CltReport,
    Gram,
    MomentResult,
    MomentSpec,
    TermReport,
    clt_report,
    concat_specs,
    cumulant,
    is_transitive,
    leading_terms,
    moment,
    pairing_weight,
    subspec,
    wigner_moment,
)
from .expr import ParseError, TraceWordAst, build_shape, elaborate, parse, pretty
from .gluing import (
    ComponentSurface,
    MirrorPropertyError,
    SurfaceReport,
    WordShape,
    back_rotation,
    front_rotation,
    lift_pairing,
    particular_cycles,
    sign_flip,
    slot_dimensions,
    surface_census,
    transpose_flip,
    vertex_permutation,
)
from .matrices import (
    DimensionError,
    Matrix,
    MatrixFormatError,
    MatrixSet,
    UnboundSlotError,
    bind_matrices,
    load_matrix,
    parse_bindings,
    parse_matrix,
    trace_along,
)
from .oracles import BudgetError, McReport, is_noncrossing, mc_oracle, wick_oracle
from .perm import (
    Pairing,
    SetPartition,
    SignedPermutation,
    compose,
    conjugate,
    crossings,
    cycle_string,
    cycles,
    enumerate_pairings,
    induced_partition,
    inverse,
    orbits,
    pairing_count,
    set_partitions,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "CltReport",
    "ComponentSurface",
    "DimensionError",
    "Gram",
    "Matrix",
    "MatrixFormatError",
    "MatrixSet",
    "McReport",
    "MirrorPropertyError",
    "MomentResult",
    "MomentSpec",
    "Pairing",
    "ParseError",
    "SetPartition",
    "SignedPermutation",
    "SurfaceReport",
    "TermReport",
    "TraceWordAst",
    "UnboundSlotError",
    "WordShape",
    "back_rotation",
    "bind_matrices",
    "build_shape",
    "clt_report",
    "compose",
    "concat_specs",
    "conjugate",
    "crossings",
    "cumulant",
    "cycle_string",
    "cycles",
    "elaborate",
    "enumerate_pairings",
    "front_rotation",
    "induced_partition",
    "inverse",
    "is_noncrossing",
    "is_transitive",
    "leading_terms",
    "lift_pairing",
    "load_matrix",
    "mc_oracle",
    "moment",
    "orbits",
    "pairing_count",
    "pairing_weight",
    "parse",
    "parse_bindings",
    "parse_matrix",
    "particular_cycles",
    "pretty",
    "set_partitions",
    "sign_flip",
    "slot_dimensions",
    "subspec",
    "surface_census",
    "trace_along",
    "transpose_flip",
    "vertex_permutation",
    "wick_oracle",
    "wigner_moment",
]
