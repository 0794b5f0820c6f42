"""First restricted cohomology of Frobenius kernels of classical groups, in exact arithmetic over F_p."""

__version__ = "0.1.0"

from .exactlin import FpMatrix, rank_and_nullspace, solve
from .frobcoh import (
    AugmentedAlgebra,
    H1Report,
    dist_sl2,
    divided_power_action,
    gr_invariants,
    h1_induced_map,
    h1_restricted,
    hopf_h1,
    restricted_derivations,
    restricted_env,
)
from .invariants import (
    chevalley_generators,
    frobenius_power_subspace,
    invariants,
    lemma11_check,
    restriction_surjectivity_check,
)
from .liealg import RestrictedLieAlgebra, centralizer_dim, check_hypotheses, construct
from .modconstruct import (
    RestrictedModule,
    check_module_axioms,
    coordring_piece,
    group_coordring_piece,
    nilcone_piece,
    sym_power_natural,
    u_piece,
)

__all__ = [
    "FpMatrix", "rank_and_nullspace", "solve", "RestrictedLieAlgebra", "construct",
    "check_hypotheses", "centralizer_dim", "RestrictedModule", "check_module_axioms",
    "coordring_piece", "sym_power_natural", "nilcone_piece", "u_piece", "group_coordring_piece",
    "invariants", "frobenius_power_subspace", "lemma11_check", "restriction_surjectivity_check",
    "chevalley_generators", "H1Report", "h1_restricted", "restricted_derivations",
    "h1_induced_map", "AugmentedAlgebra", "restricted_env", "dist_sl2", "divided_power_action",
    "hopf_h1", "gr_invariants",
]
