"""jacobicalc: exact symbolic engine for graded Jacobi calculus.

Brackets, gauged differentials and Courant-Jacobi structures on trivialized
Lie algebroids over polynomial bases, plus the first-order polydifferential
operator calculus on finite graded commutative algebras.  All arithmetic is
over the rationals; every identity the package claims is checked exactly.
"""

from .rings import ArityError, ExpPoly, Poly
from .exterior import (
    BundleModel,
    Form,
    ModelMismatch,
    MultiVector,
    contract_cov,
    deg_op,
    evaluate,
    interior,
    pairing,
    wedge,
)
from .algebroid import (
    AlgebroidSpec,
    InvalidSpec,
    ValidationReport,
    ext_derivative,
    ext_derivative_cartan,
    is_cocycle,
    lie_derivative,
    schouten,
)
from .jacobi import (
    JacobiAlgebroid,
    JacobiElement,
    UnsupportedScale,
    check_classical_pair,
    d_phi,
    d_phi_cartan,
    finite_cohomology,
    finite_homology,
    generating_bracket,
    jacobi_lie,
    koszul_form_bracket,
    lie_phi,
    lj_apply,
    lj_operator,
    sj_bracket,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
