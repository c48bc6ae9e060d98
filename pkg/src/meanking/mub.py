"""Mutually unbiased bases of C^d.

A set of ``k`` bases is stored as a complex array ``bases`` of shape
(k, d, d) with ``bases[A, a, i] = <i|A,a>``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, MeanKingError, UnsupportedError
from .field import field_make, prime_power
from .linalg import DEFAULT_TOL
from .report import VerificationReport


@dataclass(frozen=True, eq=False)
class MubSet:
    d: int
    bases: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bases, dtype=np.complex128)
        if b.ndim != 3 or b.shape[1:] != (self.d, self.d):
            raise DimensionError(f"bases must have shape (k, {self.d}, {self.d}), got {b.shape}")
        if not 2 <= b.shape[0] <= self.d + 1:
            raise MeanKingError(f"a set of MUBs in dimension {self.d} has 2..{self.d + 1} bases, got {b.shape[0]}")
        if not np.all(np.isfinite(b)):
            raise MeanKingError("MUB amplitudes must be finite")
        b.setflags(write=False)
        object.__setattr__(self, "bases", b)

    @property
    def k(self) -> int:
        return self.bases.shape[0]

    def truncate(self, k: int) -> MubSet:
        if not 2 <= k <= self.k:
            raise MeanKingError(f"cannot take {k} bases from a set of {self.k}")
        return MubSet(self.d, self.bases[:k])


def mub_standard_fourier(d: int) -> MubSet:
    """Computational basis plus the discrete Fourier basis; exists for every d >= 2."""
    if d < 2:
        raise MeanKingError(f"dimension must be at least 2, got {d}")
    idx = np.arange(d)
    fourier = np.exp(2j * np.pi * np.outer(idx, idx) / d) / np.sqrt(d)
    return MubSet(d, np.stack([np.eye(d, dtype=np.complex128), fourier]))


_PAULI_BASES = np.array([
    [[1, 0], [0, 1]],
    [[1, 1], [1, -1]] / np.sqrt(2),
    [[1, 1j], [1, -1j]] / np.sqrt(2),
], dtype=np.complex128)


def mub_prime_power(q: int) -> MubSet:
    """Complete set of q+1 MUBs for q = 2 or an odd prime power.

    Besides the computational basis, basis A (an element of GF(q)) has
    vectors <i|A,a> = w_p^{tr(A i^2 + a i)} / sqrt(q).
    """
    pm = prime_power(q)
    if pm is None:
        raise MeanKingError(f"{q} is not a prime power")
    p, m = pm
    if q == 2:
        return MubSet(2, _PAULI_BASES)
    if p == 2:
        raise UnsupportedError(f"q={q}: even prime powers above 2 are import-only")
    F = field_make(p, m)
    add, mul, tr = F.add_table, F.mul_table, F.trace_table
    elems = np.arange(q)
    sq = mul[elems, elems]
    bases = [np.eye(q, dtype=np.complex128)]
    for A in range(q):
        quad = mul[A, sq]  # A * i^2 for each i
        lin = mul[:, elems]  # lin[a, i] = a * i
        exponent = tr[add[quad[None, :], lin]]
        bases.append(np.exp(2j * np.pi * exponent / p) / np.sqrt(q))
    return MubSet(q, np.stack(bases))


def mub_auto(d: int, k: int | None = None) -> MubSet:
    """Generated MUBs for ``d``, optionally cut to the first ``k`` bases.

    Prime powers use the full q+1 construction. Other levels, and
    unsupported even prime powers when only two bases are asked for, get
    the standard/Fourier pair.
    """
    pm = prime_power(d)
    if pm is not None and (pm[0] != 2 or d == 2 or k is None or k > 2):
        full = mub_prime_power(d)
    else:
        full = mub_standard_fourier(d)
    if k is None:
        return full
    if k > full.k:
        raise UnsupportedError(f"only {full.k} MUBs can be generated for d={d}; import a file for k={k}")
    return full.truncate(k)


def mub_target(d: int, k: int) -> np.ndarray:
    """|<A,a|A',a'>|^2 expected for MUBs, indexed (A, a, A', a')."""
    same = np.eye(k)[:, None, :, None]
    return same * np.eye(d)[None, :, None, :] + (1 - same) / d


def mub_verify(m: MubSet, tol: float = DEFAULT_TOL) -> VerificationReport:
    b = m.bases
    k, d = m.k, m.d
    overlaps = np.abs(np.einsum("Aai,Bbi->AaBb", b.conj(), b)) ** 2
    dev = np.abs(overlaps - mub_target(d, k))
    worst = np.unravel_index(int(np.argmax(dev)), dev.shape)
    res = float(dev[worst])
    return VerificationReport(
        "mub_relation", res <= tol, res, tol,
        detail="" if res <= tol else "worst (A,a,A',a') = {}".format(tuple(int(x) for x in worst)),
        data={"d": d, "k": k, "worst": [int(x) for x in worst]},
    )


def mub_to_json(m: MubSet) -> dict:
    return {
        "d": m.d,
        "k": m.k,
        "bases": [[[[float(z.real), float(z.imag)] for z in vec] for vec in basis] for basis in m.bases],
    }


def mub_from_json(obj) -> MubSet:
    try:
        d, k, raw = int(obj["d"]), int(obj["k"]), obj["bases"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MeanKingError(f"malformed MUB document: {exc}") from None
    if not isinstance(raw, list) or len(raw) != k:
        raise MeanKingError(f"expected {k} bases")
    try:
        arr = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError):
        raise MeanKingError("ragged or non-numeric basis data") from None
    if arr.shape != (k, d, d, 2):
        raise MeanKingError(f"bases must have shape ({k}, {d}, {d}, 2), got {arr.shape}")
    return MubSet(d, arr[..., 0] + 1j * arr[..., 1])
