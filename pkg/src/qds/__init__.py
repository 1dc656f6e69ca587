"""Finite quantum groups: Haar states, dual blocks and square roots of the Haar state."""

from .constructors import (CayleyTable, crossed_product, from_cayley, quaternion_ch, standard_hopf,
                           tensor_product)
from .corep import extract_irreps, fusion, identify_commutative, irr_mod_gamma, subalgebra_generated
from .dsfamily import (ds_verdict, hamiltonian_certificate, nz_check, square_root, suq2_block)
from .hopf import (HopfStarAlgebra, convolve, dagger, density_of, dual_algebra, haar_state, is_kac,
                   verify_axioms)
from .linalg import get_tol, set_tol
from .report import AnalysisConfig, analyze
from .staralg import StarAlgebra

__all__ = [
    "AnalysisConfig", "CayleyTable", "HopfStarAlgebra", "StarAlgebra", "analyze", "convolve",
    "crossed_product", "dagger", "density_of", "ds_verdict", "dual_algebra", "extract_irreps",
    "from_cayley", "fusion", "get_tol", "haar_state", "hamiltonian_certificate", "identify_commutative",
    "irr_mod_gamma", "is_kac", "nz_check", "quaternion_ch", "set_tol", "square_root", "standard_hopf",
    "subalgebra_generated", "suq2_block", "tensor_product", "verify_axioms",
]
