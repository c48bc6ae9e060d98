"""Certified solutions to the Mean King's retrodiction problem for any level d.

Alice's measurement is built from an orthogonal array OA_n(k, d) and
realized as a POVM on C^d (x) C^d through an ancilla of n*d levels.
"""

from .designs import OrthogonalArray, oa_from_text, oa_mols, oa_to_text, oa_trivial, oa_verify
from .errors import DimensionError, MeanKingError, RowCapError, UnsupportedError, VerificationError
from .kernels import BACKEND
from .linalg import gram_schmidt_complete, inner, is_orthonormal, is_psd, is_unitary, tensor
from .mub import MubSet, mub_auto, mub_prime_power, mub_standard_fourier, mub_verify
from .protocol import (
    ProtocolInstance,
    SimulationReport,
    alice_basis_formula,
    alice_basis_general,
    alice_basis_trivial_example,
    assemble,
    build_states,
    h_from_oa,
    povm_compress,
    simulate_rounds,
    success_exact,
    verify_h,
)
from .report import VerificationReport

__version__ = "0.1.0"
