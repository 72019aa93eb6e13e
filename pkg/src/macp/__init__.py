"""Rank-2 oriented matroid posets, their shellability certificates, and
GF(2) homology checks, all in exact arithmetic."""

from .errors import Violation  # noqa: F401
from .omcore import (  # noqa: F401
    Chirotope2,
    Rank1OM,
    Rank2OM,
    SignVector,
    canonical_form,
    check_basis_orientation,
    chirotope_from_vectors,
    cocircuits,
    convex_hull,
    covectors,
    mu,
    parallel_class,
    relabel,
    reorient,
    validate_covector_axioms,
    validate_grassmann_plucker,
)
