"""Dense complex vectors and matrices.

Vectors and matrices are plain ``numpy`` complex128 arrays. A list of
vectors is stored as a 2-D array whose *rows* are the vectors. Vectors on
Alice's extended space C^{d'} (x) C^d use the flat index
``alice_index * d + king_index``.
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DimensionError, MeanKingError, VerificationError
from .report import VerificationReport

DEFAULT_TOL = 1e-9
DROP_FLOOR = 1e-8


def as_vector(u) -> np.ndarray:
    v = np.asarray(u, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise MeanKingError("vector has non-finite entries")
    return v


def as_vectors(vs, dim: int | None = None) -> np.ndarray:
    """Stack a sequence of vectors into a (count, dim) array."""
    arr = np.asarray(vs, dtype=np.complex128)
    if arr.size == 0:
        if dim is None:
            raise DimensionError("cannot infer dimension of an empty vector list")
        return np.zeros((0, dim), dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"expected a list of equal-length vectors, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionError(f"vectors have dimension {arr.shape[1]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise MeanKingError("vectors have non-finite entries")
    return arr


def as_matrix(M) -> np.ndarray:
    m = np.asarray(M, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MeanKingError("matrix has non-finite entries")
    return m


def inner(u, v) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    u, v = as_vector(u), as_vector(v)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.size} vs {v.size}")
    return complex(np.vdot(u, v))


def tensor(u, v) -> np.ndarray:
    """Kronecker product with entry ``i * len(v) + j`` equal to ``u[i] * v[j]``."""
    return np.kron(as_vector(u), as_vector(v))


def gram_residual(vs) -> tuple[float, tuple[int, int]]:
    """Largest |<v_i|v_j> - delta_ij| and the pair where it occurs."""
    if vs.shape[0] == 0:
        return 0.0, (0, 0)
    dev = np.abs(vs.conj() @ vs.T - np.eye(vs.shape[0]))
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    if i > j:
        i, j = j, i
    return float(dev[i, j]), (int(i), int(j))


def is_orthonormal(vs, tol: float = DEFAULT_TOL, name: str = "orthonormal") -> VerificationReport:
    vs = as_vectors(vs)
    res, pair = gram_residual(vs)
    return VerificationReport(
        name, res <= tol, res, tol,
        detail=f"worst pair {pair}" if res > tol else "",
        data={"pair": list(pair), "count": int(vs.shape[0])},
    )


def is_unitary(M, tol: float = DEFAULT_TOL, name: str = "unitary") -> VerificationReport:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"unitary check needs a square matrix, got {M.shape}")
    res = float(np.max(np.abs(M.conj().T @ M - np.eye(M.shape[0]))))
    return VerificationReport(name, res <= tol, res, tol)


def is_psd(M, tol: float = DEFAULT_TOL, name: str = "psd") -> VerificationReport:
    """Positivity via the spectrum of the Hermitian part; ``residual`` is the minimum eigenvalue."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"PSD check needs a square matrix, got {M.shape}")
    herm_dev = float(np.max(np.abs(M - M.conj().T)))
    if herm_dev > tol:
        return VerificationReport(name, False, herm_dev, tol, detail="matrix is not Hermitian",
                                  data={"hermiticity": herm_dev})
    lam = float(np.linalg.eigvalsh((M + M.conj().T) / 2).min())
    return VerificationReport(name, lam >= -tol, lam, tol, data={"min_eigenvalue": lam})


def gram_schmidt_complete(given, ambient_dim: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Extend orthonormal ``given`` to an orthonormal basis of C^ambient_dim.

    The output's leading rows are ``given`` unchanged. Further rows come from
    projecting e_0, e_1, ... (in index order) off the current span and
    keeping residuals whose norm exceeds ``max(tol, 1e-8)``.
    """
    if ambient_dim < 1:
        raise DimensionError(f"ambient dimension must be positive, got {ambient_dim}")
    seeds = as_vectors(given, ambient_dim)
    if seeds.shape[0] > ambient_dim:
        raise DimensionError(f"{seeds.shape[0]} vectors cannot be orthonormal in dimension {ambient_dim}")
    res, pair = gram_residual(seeds)
    if res > tol:
        raise VerificationError(VerificationReport(
            "gram_schmidt_complete.input", False, res, tol,
            detail=f"input vectors {pair} not orthonormal", data={"pair": list(pair)}))
    count, out = kernels.complete_basis(np.ascontiguousarray(seeds), ambient_dim, max(tol, DROP_FLOOR))
    if count < ambient_dim:
        raise MeanKingError(
            f"completion stalled at {count} of {ambient_dim} vectors (numerical degeneracy)")
    return out
