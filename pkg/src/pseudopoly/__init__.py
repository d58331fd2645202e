"""LP decoding of binary LDPC codes over the relaxed codeword polytope,
facet-guessing decoders, and polytope structure analysis."""

__version__ = "0.1.0"

from .codes import (
    ExpansionCertificate,
    ParityCheckMatrix,
    enumerate_codewords,
    from_alist,
    nullspace_basis,
    random_regular,
    syndrome,
    to_alist,
    unique_neighbor_witness,
    verify_expansion,
)
from .polytope import (
    ActiveSet,
    FractionalSupport,
    LinearConstraint,
    RelaxedPolytope,
    StructureConstants,
    active_set,
    active_set_bound,
    build_polytope,
    fractional_support,
    local_active_intersection,
    local_restriction,
    restrict_to_facet,
    structure_constants,
)
from .simplex import (
    BasicSolution,
    IterationLimitError,
    LinearProgram,
    RestrictionInfeasibleError,
    SolverError,
    certify_vertex,
    solve,
    solve_decoding_lp,
)
from .decoders import (
    DecodeOutcome,
    Exhaustive,
    PseudocodewordCensus,
    Randomized,
    count_better_pseudocodewords,
    enumerate_vertices,
    facet_guess,
    lp_decode,
    ml_decode_bruteforce,
    sum_product_decode,
)
from .channels import BiAwgn, Bsc, llr, transmit
