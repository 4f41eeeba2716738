"""Pascal matrix spectral toolkit.

Exact construction of the Pascal matrix family and its commuting
tridiagonal companions, banded difference-operator algebra with the
generalized Fourier map, numerically stable binary64 diagonalization of
the Pascal matrix through the commuting Jacobi matrix, and a certified
high-precision reference eigensolver.
"""

from .exact import (
    ExactMatrix,
    ExactTridiagonal,
    binomial,
    commutator,
    dual_S,
    fourier_image_JN,
    jacobi_J,
    jacobi_JN,
    jacobi_Jtilde,
    pascal_lower,
    pascal_symmetric,
    sign_diagonal,
    verify_suite,
)
from .diffop import (
    DiffOp,
    GeneratorWord,
    apply,
    bispectral_check,
    check_identity_fubar,
    fourier_map,
    fourier_map_numeric,
    in_fourier_algebra,
    matrix_rep,
    op_add,
    op_adjoint,
    op_multiply,
    op_scale,
    orthogonality_check,
    recover_coefficients,
    recover_x_band,
    recover_y_band,
)
from .spectral import (
    EigenPair,
    SpectralDecomposition,
    binomial_eigenbasis,
    binomial_transform,
    dense_sym_eigen,
    middle_eigenvector,
    pascal_eigen_via_J,
    pascal_float,
    reflection_check,
    tridiag_eigen,
)
from .oracle import (
    HPEigenPair,
    eigenvector_error,
    hp_eigenvalues,
    hp_eigenvector,
    hp_spectrum,
)
from .report import Check, IdentityReport

__version__ = "0.1.0"
