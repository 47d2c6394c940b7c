"""Recover structured linear operators from a few random matrix-vector products.

An operator is expanded in a family of pseudodifferential basis matrices
``B_j`` and the coefficients are fitted by least squares against the action
of the operator (forward probing) or of its pseudoinverse (backward probing)
on random probe vectors.
"""

from .basis import (BasisFamily, GramDiagnostics, SeparableBasisElement, basis_apply,
                    dense_diagnostics, gram_matrix, make_cheb1d_family, make_chebdisk_family,
                    make_family, make_fourier_family, replicated_diagnostics, transformed_family)
from .errors import CapabilityError, DimensionError, MatprobeError, ValidationError
from .numerics import RandomStream, dft, draw_sequence, least_squares
from .operators import (EllipticMedia, FoveationSpec, LinearOperator, NullspaceFilter,
                        condition_number, dense_operator, elliptic_operator, elliptic_symbol,
                        foveation_operator, foveation_symbol, identity_filter, identity_operator,
                        mean_filter, symbol_operator)
from .probing import (ProbeConfig, ProbeResult, backward_probe, error_bound_check,
                      forward_probe, reconstruct)
from .symbols import (DiscreteSymbol, Grid, matrix_to_symbol, symbol_adjoint, symbol_apply,
                      symbol_compose, symbol_to_matrix, symbol_trace)

__version__ = "0.1.0"
