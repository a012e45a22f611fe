"""Higher commutators of finite algebras through Delta relations and forks."""
from .algebra import FiniteAlgebra, OperationTable
from .clones import (PolymorphismSet, check_largest_clone, largest_commutator_preserving_clone,
                     polymorphisms)
from .congruence import Congruence, CongruenceLattice, cg, con_lattice, is_congruence, join, meet
from .delta import (centralizes, commutator, commutator_forks, commutator_termcond, delta,
                    delta_join_check, delta_membership, supernilpotence_degree)
from .errors import (AlgebraError, HicommError, NoMalcevTermError, ResourceLimitError,
                     VerificationError)
from .hcsuite import hc_suite
from .hypercube import (IndexMap, band, bit, face_projection, forks, generator_tuple,
                        paired_faces, reindex, xor)
from .io import parse_algebra, serialize_algebra
from .malcev import (CubeTermWitness, find_malcev_term, is_malcev_term, strong_cube_term,
                     verify_strong_cube)
from .relation import TupleRelation, sg_power
from .terms import App, Var, eval_term, parse_term
from .zoo import zoo

__version__ = "0.1.0"

__all__ = [
    "AlgebraError", "App", "Congruence", "CongruenceLattice", "CubeTermWitness", "FiniteAlgebra",
    "HicommError", "IndexMap", "NoMalcevTermError", "OperationTable", "PolymorphismSet",
    "ResourceLimitError", "TupleRelation", "Var", "VerificationError", "band", "bit", "centralizes",
    "cg", "check_largest_clone", "commutator", "commutator_forks", "commutator_termcond",
    "con_lattice", "delta", "delta_join_check", "delta_membership", "eval_term",
    "face_projection", "find_malcev_term", "forks", "generator_tuple", "hc_suite",
    "is_congruence", "is_malcev_term", "join", "largest_commutator_preserving_clone", "meet",
    "paired_faces", "parse_algebra", "parse_term", "polymorphisms", "reindex",
    "serialize_algebra", "sg_power", "strong_cube_term", "supernilpotence_degree",
    "verify_strong_cube", "xor", "zoo",
]
