"""The King/Alice retrodiction protocol.

Alice entangles the King's d-level system with an ancilla of dimension
d' = n*d, the King measures in one of k mutually unbiased bases, and Alice
measures the joint system in an orthonormal basis {|I>} of C^{d'} (x) C^d.
Rows of an OA_n(k, d) tell her what to answer.

All state vectors live in C^{d'} (x) C^d with flat index ``i * d + j``
(ancilla index ``i``, King index ``j``). Collections of vectors are arrays
whose last axis is that flat index.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import kernels
from .designs import OrthogonalArray
from .errors import DimensionError, MeanKingError, VerificationError
from .linalg import DEFAULT_TOL, gram_residual, gram_schmidt_complete, is_orthonormal, is_psd
from .mub import MubSet, mub_target
from .report import VerificationReport


@dataclass(frozen=True, eq=False)
class ProtocolInstance:
    mubs: MubSet
    oa: OrthogonalArray
    phi: np.ndarray  # (N,)  maximally entangled start state
    phi_Aa: np.ndarray  # (k, d, N)  states after the King sees outcome a in basis A
    phi_hat: np.ndarray  # (k, d, N)  Fourier combinations over a
    b_basis: np.ndarray  # (e, N)  orthonormal basis of the complement of span(phi_Aa)
    alice_basis: np.ndarray | None = None  # (N, N), row I is |I>

    @property
    def d(self) -> int:
        return self.mubs.d

    @property
    def k(self) -> int:
        return self.mubs.k

    @property
    def n(self) -> int:
        return self.oa.n

    @property
    def d_ancilla(self) -> int:
        return self.n * self.d

    @property
    def dim(self) -> int:
        return self.n * self.d ** 2

    @property
    def e(self) -> int:
        return self.b_basis.shape[0]

    @property
    def estimation(self) -> np.ndarray:
        return self.oa.rows

    def hat_list(self) -> np.ndarray:
        """|Phi>, then |Phi^_{A,j}> for A ascending and j = 1..d-1."""
        return np.concatenate([self.phi[None, :], self.phi_hat[:, 1:, :].reshape(-1, self.dim)])

    def with_basis(self, basis) -> ProtocolInstance:
        return dataclasses.replace(self, alice_basis=np.asarray(basis, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class SimulationReport:
    success: np.ndarray  # (k, d) success probability (exact) or frequency (sampled)
    mode: str
    rounds: int | None = None
    seed: int | None = None
    trials: np.ndarray | None = None
    wins: np.ndarray | None = None

    @property
    def worst(self) -> float:
        vals = self.success if self.trials is None else self.success[self.trials > 0]
        return float(vals.min()) if vals.size else float("nan")

    @property
    def overall(self) -> float:
        if self.mode == "exact":
            return float(self.success.mean())
        return float(self.wins.sum() / self.trials.sum())

    def to_dict(self) -> dict[str, Any]:
        out = {"mode": self.mode, "worst_case": self.worst, "overall": self.overall,
               "success_matrix": self.success.tolist()}
        if self.mode == "sampled":
            out.update(rounds=self.rounds, seed=self.seed, successes=int(self.wins.sum()),
                       trials=self.trials.tolist())
        return out


def _omega_table(d: int) -> np.ndarray:
    idx = np.arange(d)
    return np.exp(2j * np.pi * np.outer(idx, idx) / d)


def _require(report: VerificationReport) -> VerificationReport:
    if not report.passed:
        raise VerificationError(report)
    return report


def build_states(mubs: MubSet, oa: OrthogonalArray, tol: float = DEFAULT_TOL) -> ProtocolInstance:
    """Entangled start state, post-measurement states, hat states and a basis of B."""
    if oa.k != mubs.k or oa.d != mubs.d:
        raise DimensionError(f"OA has (k={oa.k}, d={oa.d}) but MUB set has (k={mubs.k}, d={mubs.d})")
    d, k, n = mubs.d, mubs.k, oa.n
    d_anc, N = n * d, n * d * d

    # |i>_A lives in the first d ancilla levels
    phi = np.zeros((d_anc, d), dtype=np.complex128)
    phi[np.arange(d), np.arange(d)] = 1 / np.sqrt(d)
    phi = phi.reshape(N)

    b = mubs.bases  # b[A, a, i] = <i|A,a>
    alice_side = np.zeros((k, d, d_anc), dtype=np.complex128)
    alice_side[:, :, :d] = b.conj()
    phi_Aa = np.einsum("Aai,Aaj->Aaij", alice_side, b).reshape(k, d, N)

    phi_hat = np.einsum("ja,Aax->Ajx", _omega_table(d), phi_Aa) / np.sqrt(d)

    inst = ProtocolInstance(mubs, oa, phi, phi_Aa, phi_hat, np.zeros((0, N), dtype=np.complex128))
    for rep in check_states(inst, tol):
        _require(rep)
    full = gram_schmidt_complete(inst.hat_list(), N, tol)
    return dataclasses.replace(inst, b_basis=full[k * (d - 1) + 1:])


def check_states(inst: ProtocolInstance, tol: float = DEFAULT_TOL) -> list[VerificationReport]:
    d, k = inst.d, inst.k
    reps = []
    norm_dev = abs(np.linalg.norm(inst.phi) - 1)
    reps.append(VerificationReport("phi_normalized", norm_dev <= tol, norm_dev, tol))

    flat = inst.phi_Aa.reshape(k * d, -1)
    gram = (flat.conj() @ flat.T).reshape(k, d, k, d)
    res = float(np.max(np.abs(gram - mub_target(d, k))))
    reps.append(VerificationReport("post_measurement_overlaps", res <= tol, res, tol))

    hat = inst.phi_hat.reshape(k * d, -1)
    hgram = (hat.conj() @ hat.T).reshape(k, d, k, d)
    same = np.eye(k)[:, None, :, None]
    j0 = np.zeros(d)
    j0[0] = 1
    target = same * np.eye(d)[None, :, None, :] + (1 - same) * j0[None, :, None, None] * j0[None, None, None, :]
    res = float(np.max(np.abs(hgram - target)))
    reps.append(VerificationReport("hat_state_gram", res <= tol, res, tol))

    res = float(np.max(np.abs(inst.phi_hat[:, 0, :] - inst.phi[None, :])))
    reps.append(VerificationReport("hat_zero_is_phi", res <= tol, res, tol))

    rank = int(np.linalg.matrix_rank(flat, tol=max(tol, 1e-8)))
    expected = k * (d - 1) + 1
    reps.append(VerificationReport("span_rank", rank == expected, float(abs(rank - expected)), 0.0,
                                   data={"rank": rank, "expected": expected}))
    return reps


def check_decomposition(inst: ProtocolInstance, tol: float = DEFAULT_TOL) -> list[VerificationReport]:
    """dim B matches n d^2 - k(d-1) - 1 and B is orthogonal to every post-measurement state."""
    d, k, n = inst.d, inst.k, inst.n
    expected = n * d * d - k * (d - 1) - 1
    reps = [VerificationReport("dim_B", inst.e == expected, float(abs(inst.e - expected)), 0.0,
                               data={"e": inst.e, "expected": expected})]
    if inst.e:
        cross = float(np.max(np.abs(inst.b_basis.conj() @ inst.phi_Aa.reshape(k * d, -1).T)))
        res, _ = gram_residual(inst.b_basis)
        res = max(res, cross)
    else:
        res = 0.0
    reps.append(VerificationReport("B_orthonormal_complement", res <= tol, res, tol))
    return reps


def h_from_oa(oa: OrthogonalArray) -> np.ndarray:
    """H(I; A, a) = delta(a, T(I, A)) / sqrt(n d), columns flattened as A*d + a."""
    N = oa.rows.shape[0]
    h = np.zeros((N, oa.k, oa.d))
    I = np.arange(N)[:, None]
    A = np.arange(oa.k)[None, :]
    h[I, A, oa.rows] = 1 / np.sqrt(oa.n * oa.d)
    return h.reshape(N, oa.k * oa.d).astype(np.complex128)


def verify_h(h, s, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Zero pattern dictated by the estimation table ``s`` and the Gram condition on columns."""
    h = np.asarray(h, dtype=np.complex128)
    s = np.asarray(s)
    if s.ndim != 2 or h.ndim != 2 or h.shape[0] != s.shape[0] or h.shape[1] % s.shape[1]:
        raise DimensionError(f"H of shape {h.shape} does not fit estimation table of shape {s.shape}")
    N, k = s.shape
    d = h.shape[1] // k
    h3 = h.reshape(N, k, d)
    allowed = s[:, :, None] == np.arange(d)[None, None, :]
    forbidden = np.abs(np.where(allowed, 0, h3))
    zero_res = float(forbidden.max())
    gram = (h.conj().T @ h).reshape(k, d, k, d)
    gram_res = float(np.max(np.abs(gram - mub_target(d, k))))
    data = {"zero_pattern_residual": zero_res, "gram_residual": gram_res}
    detail = ""
    if zero_res > tol:
        I, A, a = np.unravel_index(int(np.argmax(forbidden)), forbidden.shape)
        data["violation"] = [int(I), int(A), int(a)]
        detail = f"H({I};{A},{a}) = {forbidden[I, A, a]:.3e} but s({I},{A}) = {s[I, A]}"
    elif gram_res > tol:
        detail = "H^dagger H differs from the MUB Gram matrix"
    res = max(zero_res, gram_res)
    return VerificationReport("h_conditions", res <= tol, res, tol, detail=detail, data=data)


def overlap_matrix(inst: ProtocolInstance, basis=None) -> np.ndarray:
    """<I|Phi_{A,a}> as an (N, k*d) matrix."""
    basis = inst.alice_basis if basis is None else basis
    if basis is None:
        raise MeanKingError("instance has no Alice basis yet")
    return basis.conj() @ inst.phi_Aa.reshape(inst.k * inst.d, -1).T


def _hat_columns(h: np.ndarray, k: int, d: int) -> np.ndarray:
    """Fourier transform of H's columns over a, ordered like ``hat_list``."""
    N = h.shape[0]
    psi = h.reshape(N, k, d)
    psi_hat = np.einsum("ja,IAa->AjI", _omega_table(d), psi) / np.sqrt(d)
    return np.concatenate([psi_hat[0, :1, :], psi_hat[:, 1:, :].reshape(-1, N)])


def alice_basis_general(inst: ProtocolInstance, h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Alice's basis from any valid H via a unitary extension.

    Maps each hat state onto the matching Fourier combination of H's
    columns, sends the basis of B onto a Gram-Schmidt completion of those,
    and returns |I> = U^dagger |I>> as the rows of an (N, N) array.
    """
    h = np.asarray(h, dtype=np.complex128)
    N, k, d = inst.dim, inst.k, inst.d
    if h.shape != (N, k * d):
        raise DimensionError(f"H must have shape ({N}, {k * d}), got {h.shape}")
    _require(verify_h(h, inst.estimation, tol))
    src = np.concatenate([inst.hat_list(), inst.b_basis])
    dst = gram_schmidt_complete(_hat_columns(h, k, d), N, tol)
    # U = sum_r |dst_r>><src_r|, and U^dagger e_I is the conjugate of row I of U
    U = dst.T @ src.conj()
    basis = U.conj()
    for rep in check_alice_basis(inst, basis, h, tol):
        _require(rep)
    return basis


def check_alice_basis(inst: ProtocolInstance, basis, h, tol: float = DEFAULT_TOL) -> list[VerificationReport]:
    basis = np.asarray(basis, dtype=np.complex128)
    reps = []
    if basis.shape != (inst.dim, inst.dim):
        return [VerificationReport("alice_basis_shape", False, float("inf"), 0.0,
                                   detail=f"expected ({inst.dim}, {inst.dim}), got {basis.shape}")]
    reps.append(is_orthonormal(basis, tol, name="alice_basis_orthonormal"))
    ov = overlap_matrix(inst, basis)
    res = float(np.max(np.abs(ov - h)))
    reps.append(VerificationReport("overlaps_equal_H", res <= tol, res, tol))
    surv = verify_h(ov, inst.estimation, tol)
    reps.append(dataclasses.replace(surv, name="survival_condition"))
    return reps


def alice_basis_formula(inst: ProtocolInstance, oa: OrthogonalArray | None = None,
                        general=None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """|I> = |I'>/sqrt(n) + sum_b c_{I,b} |Xi_b>, with the c_{I,b} read off the general route.

    |I'> = (1/sqrt d) sum_A |Phi_{A, s(I,A)}> - ((k-1)/d) |Phi>.
    """
    oa = inst.oa if oa is None else oa
    if general is None:
        general = alice_basis_general(inst, h_from_oa(oa), tol)
    d, k, n = inst.d, inst.k, oa.n
    s = oa.rows
    A = np.arange(k)[None, :]
    i_prime = inst.phi_Aa[A, s].sum(axis=1) / np.sqrt(d) - (k - 1) / d * inst.phi[None, :]
    coeffs = general.conj() @ inst.b_basis.T  # c[I, b] = <Xi_b|I>
    basis = i_prime / np.sqrt(n) + coeffs @ inst.b_basis
    res = float(np.max(np.abs(basis - general)))
    _require(VerificationReport("formula_matches_general", res <= tol, res, tol))
    return basis


def i_prime_vectors(inst: ProtocolInstance) -> np.ndarray:
    d, k = inst.d, inst.k
    A = np.arange(k)[None, :]
    return inst.phi_Aa[A, inst.estimation].sum(axis=1) / np.sqrt(d) - (k - 1) / d * inst.phi[None, :]


def theta_indices(k: int, d: int) -> np.ndarray:
    """All J < d^k with at least two nonzero base-d digits, ascending."""
    J = np.arange(d ** k)
    digits = np.stack([(J // d ** A) % d for A in range(k)], axis=1)
    return J[(digits != 0).sum(axis=1) >= 2]


def trivial_b_basis(inst: ProtocolInstance) -> np.ndarray:
    """Standard vectors |i>_A (x) |j>_K with i >= d, in flat-index order."""
    d, N = inst.d, inst.dim
    idx = np.arange(d * d, N)
    out = np.zeros((idx.size, N), dtype=np.complex128)
    out[np.arange(idx.size), idx] = 1
    return out


def alice_basis_trivial_example(inst: ProtocolInstance, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Closed-form basis for the all-tuples array OA_{d^(k-2)}(k, d).

    |I> = d^{-(k-2)/2} |I'> + d^{-k/2} sum_b w^{-sum_A I_A Theta(b)_A} |Xi_b>,
    where Theta enumerates the J with two or more nonzero digits. For
    k = d+1 the Xi_b are the standard vectors outside the first d ancilla
    levels; otherwise the instance's completion basis of B is used.
    """
    d, k, N = inst.d, inst.k, inst.dim
    I = np.arange(N)
    digits = np.stack([(I // d ** A) % d for A in range(k)], axis=1)
    if inst.n != d ** (k - 2) or not np.array_equal(inst.estimation, digits):
        raise MeanKingError("closed form applies only to the all-tuples orthogonal array")
    theta = theta_indices(k, d)
    if k == d + 1:
        xi = trivial_b_basis(inst)
        cross = float(np.max(np.abs(xi.conj() @ inst.hat_list().T))) if xi.size else 0.0
        _require(VerificationReport("trivial_B_orthogonal_to_span", cross <= tol, cross, tol))
    else:
        xi = inst.b_basis
    if theta.size != xi.shape[0]:
        raise AssertionError(f"|Theta| = {theta.size} but dim B = {xi.shape[0]}")
    theta_digits = np.stack([(theta // d ** A) % d for A in range(k)], axis=1)
    phase = np.exp(-2j * np.pi * ((digits @ theta_digits.T) % d) / d)
    basis = i_prime_vectors(inst) / np.sqrt(d ** (k - 2)) + (phase @ xi) / np.sqrt(d ** k)
    for rep in check_alice_basis(inst, basis, h_from_oa(inst.oa), tol):
        _require(rep)
    return basis


def fourier_column(J: int, k: int, d: int) -> np.ndarray:
    """|Psi^_J>> = d^{-k/2} sum_I w^{sum_A I_A J_A} |I>>."""
    I = np.arange(d ** k)
    expo = sum(((I // d ** A) % d) * ((J // d ** A) % d) for A in range(k))
    return np.exp(2j * np.pi * (expo % d) / d) / np.sqrt(d ** k)


def assemble(mubs: MubSet, oa: OrthogonalArray, tol: float = DEFAULT_TOL) -> ProtocolInstance:
    inst = build_states(mubs, oa, tol)
    return inst.with_basis(alice_basis_general(inst, h_from_oa(oa), tol))


def povm_compress(inst: ProtocolInstance) -> np.ndarray:
    """POVM elements on C^d (x) C^d: each |I><I| restricted to the first d ancilla levels."""
    if inst.alice_basis is None:
        raise MeanKingError("instance has no Alice basis yet")
    d = inst.d
    v = inst.alice_basis.reshape(inst.dim, inst.d_ancilla, d)[:, :d, :].reshape(inst.dim, d * d)
    return np.einsum("Ix,Iy->Ixy", v, v.conj())


def check_povm(povm, tol: float = DEFAULT_TOL) -> list[VerificationReport]:
    povm = np.asarray(povm)
    D = povm.shape[1]
    res = float(np.max(np.abs(povm.sum(axis=0) - np.eye(D))))
    reps = [VerificationReport("povm_complete", res <= tol, res, tol)]
    min_eig = min(is_psd(M, tol).residual for M in povm)
    reps.append(VerificationReport("povm_positive", min_eig >= -tol, min_eig, tol,
                                   data={"min_eigenvalue": min_eig}))
    return reps


def success_exact(inst: ProtocolInstance, s=None) -> SimulationReport:
    """P(success | A, a) = sum_I delta(a, s(I,A)) |<I|Phi_{A,a}>|^2."""
    s = inst.estimation if s is None else np.asarray(s)
    k, d = inst.k, inst.d
    prob = np.abs(overlap_matrix(inst)) ** 2
    prob = prob.reshape(inst.dim, k, d)
    hit = s[:, :, None] == np.arange(d)[None, None, :]
    return SimulationReport(np.where(hit, prob, 0.0).sum(axis=0), "exact")


def _cdf(p: np.ndarray) -> np.ndarray:
    """Cumulative distribution along the last axis, pinned to 1.0 from the last positive entry on."""
    c = np.cumsum(p, axis=-1)
    c = c / c[..., -1:]
    positive = p > 0
    last = p.shape[-1] - 1 - np.argmax(positive[..., ::-1], axis=-1)
    mask = np.arange(p.shape[-1]) >= last[..., None]
    c[mask] = 1.0
    return np.ascontiguousarray(c)


def simulate_rounds(inst: ProtocolInstance, rounds: int, seed: int, s=None) -> SimulationReport:
    """Monte Carlo play of the game with inverse-CDF sampling from one seeded stream."""
    if rounds < 1:
        raise MeanKingError(f"rounds must be at least 1, got {rounds}")
    if inst.alice_basis is None or inst.alice_basis.shape[0] == 0:
        raise MeanKingError("instance has no Alice basis yet")
    s = inst.estimation if s is None else np.asarray(s)
    k, d, N = inst.k, inst.d, inst.dim
    # probability of the King's outcome a: norm of (1 (x) P_{A,a}) |Phi>
    king = inst.phi.reshape(inst.d_ancilla, d)
    amp = np.einsum("Aaj,ij->Aai", inst.mubs.bases.conj(), king)
    p_a = (np.abs(amp) ** 2).sum(axis=2)
    p_I = (np.abs(overlap_matrix(inst)) ** 2).T.reshape(k, d, N)
    u = np.random.default_rng(seed).random((rounds, 3))
    trials, wins = kernels.sample_rounds(
        u, _cdf(np.full(k, 1.0 / k)), _cdf(p_a), _cdf(p_I), np.ascontiguousarray(s, dtype=np.int64))
    with np.errstate(invalid="ignore", divide="ignore"):
        freq = np.where(trials > 0, wins / np.maximum(trials, 1), 0.0)
    return SimulationReport(freq, "sampled", rounds=rounds, seed=seed, trials=trials, wins=wins)
