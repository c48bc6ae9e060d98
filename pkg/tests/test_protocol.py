import numpy as np
import pytest

from conftest import instance, make_oa
from meanking.designs import OrthogonalArray, oa_mols, oa_trivial
from meanking.errors import DimensionError, MeanKingError, VerificationError
from meanking.linalg import is_orthonormal
from meanking.mub import mub_auto, mub_prime_power
from meanking.protocol import (
    _hat_columns,
    alice_basis_formula,
    alice_basis_general,
    alice_basis_trivial_example,
    build_states,
    check_decomposition,
    check_states,
    fourier_column,
    h_from_oa,
    i_prime_vectors,
    overlap_matrix,
    povm_compress,
    simulate_rounds,
    success_exact,
    theta_indices,
    verify_h,
)


@pytest.mark.parametrize("d,k,n_expected_e", [(3, 4, 0), (2, 2, 1)])
def test_dim_B(d, k, n_expected_e):
    method = "mols" if k == d + 1 else "trivial"
    inst = build_states(mub_auto(d, k), make_oa(d, k, method))
    assert inst.e == n_expected_e
    assert all(r.passed for r in check_decomposition(inst))


def test_hat_states_and_overlaps():
    inst = build_states(mub_prime_power(5), oa_mols(5))
    reps = {r.name: r for r in check_states(inst, 1e-10)}
    assert all(r.passed for r in reps.values())
    assert reps["span_rank"].data["rank"] == 6 * 4 + 1


def test_phi_aa_uses_conjugated_alice_side():
    inst = build_states(mub_prime_power(3), oa_mols(3))
    b = inst.mubs.bases
    A, a = 2, 1
    expected = np.kron(b[A, a].conj(), b[A, a])
    np.testing.assert_allclose(inst.phi_Aa[A, a], expected, atol=1e-15)


def test_mismatched_inputs_rejected():
    with pytest.raises(DimensionError):
        build_states(mub_prime_power(3), oa_mols(5))


def test_h_from_trivial_d2():
    h = h_from_oa(oa_trivial(2, 2))
    assert h.shape == (4, 4)
    assert np.all(h.imag == 0)
    gram = (h.conj().T @ h).real
    # hand sum over the four rows: diagonal blocks identity, cross blocks 1/2
    np.testing.assert_allclose(gram[:2, :2], np.eye(2))
    np.testing.assert_allclose(gram[:2, 2:], np.full((2, 2), 0.5))
    assert verify_h(h, oa_trivial(2, 2).rows).passed


def test_h_from_mols_d3_structure():
    h = h_from_oa(oa_mols(3)).reshape(9, 4, 3)
    nz = np.abs(h) > 0
    assert np.all(nz.sum(axis=2) == 1)
    np.testing.assert_allclose(h[nz], 1 / np.sqrt(3))


def test_verify_h_detects_zero_pattern_violation():
    oa = oa_mols(3)
    h = h_from_oa(oa)
    h[4, 3 * 1 + (oa.rows[4, 1] + 1) % 3] = 0.1
    rep = verify_h(h, oa.rows)
    assert not rep.passed
    assert rep.data["violation"] == [4, 1, int((oa.rows[4, 1] + 1) % 3)]


def test_verify_h_detects_scaling():
    oa = oa_mols(3)
    rep = verify_h(1.01 * h_from_oa(oa), oa.rows)
    assert not rep.passed
    assert rep.residual == pytest.approx(1.01 ** 2 - 1, abs=1e-12)


def test_non_oa_gives_failing_h():
    rows = oa_mols(3).rows.copy()
    rows[-1] = [2, 2, 1, 1]
    bad = OrthogonalArray(1, 4, 3, rows)
    assert not verify_h(h_from_oa(bad), rows).passed


def test_general_basis_d2_k2_success():
    inst = instance(2, 2, "trivial")
    assert inst.alice_basis.shape == (4, 4)
    np.testing.assert_allclose(success_exact(inst).success, 1, atol=1e-12)


def test_general_basis_reproduces_h_d5():
    inst = instance(5, 6, "mols")
    np.testing.assert_allclose(overlap_matrix(inst), h_from_oa(inst.oa), atol=1e-9)


def test_general_rejects_invalid_h():
    inst = build_states(mub_prime_power(3), oa_mols(3))
    with pytest.raises(VerificationError):
        alice_basis_general(inst, 1.01 * h_from_oa(inst.oa))


def test_mols_basis_is_I_prime():
    inst = instance(3, 4, "mols")
    np.testing.assert_allclose(inst.alice_basis, i_prime_vectors(inst), atol=1e-12)


@pytest.mark.parametrize("cfg", [(2, 2, "trivial"), (3, 4, "trivial"), (6, 2, "trivial"), (2, 3, "mols")])
def test_formula_matches_general(cfg):
    inst = instance(*cfg)
    f = alice_basis_formula(inst, general=inst.alice_basis)
    np.testing.assert_allclose(f, inst.alice_basis, atol=1e-9)
    # <Phi|I> = 1/(d sqrt n)
    np.testing.assert_allclose(f.conj() @ inst.phi, 1 / (inst.d * np.sqrt(inst.n)), atol=1e-12)
    # Pythagoras in the decomposition: ||I'||^2 / n + sum_b |c_b|^2 = 1
    c = f.conj() @ inst.b_basis.T
    np.testing.assert_allclose(np.linalg.norm(i_prime_vectors(inst), axis=1) / np.sqrt(inst.n),
                               np.sqrt(1 - (np.abs(c) ** 2).sum(axis=1)), atol=1e-12)


def test_theta_counts():
    assert theta_indices(2, 2).tolist() == [3]
    brute = sum(1 for J in range(27) if sum(1 for A in range(3) if (J // 3 ** A) % 3) >= 2)
    assert brute == 20 == theta_indices(3, 3).size == 27 - 3 * 2 - 1


def test_fourier_columns_match_hat_columns():
    k, d = 3, 3
    hat = _hat_columns(h_from_oa(oa_trivial(k, d)), k, d)
    for A in range(k):
        for j in range(1, d):
            np.testing.assert_allclose(fourier_column(j * d ** A, k, d), hat[1 + A * (d - 1) + j - 1], atol=1e-12)
    np.testing.assert_allclose(fourier_column(0, k, d), hat[0], atol=1e-12)


@pytest.mark.parametrize("cfg", [(2, 2, "trivial"), (3, 4, "trivial"), (6, 2, "trivial")])
def test_trivial_closed_form(cfg):
    inst = instance(*cfg)
    closed = alice_basis_trivial_example(inst)
    assert is_orthonormal(closed).passed
    np.testing.assert_allclose(overlap_matrix(inst, closed), overlap_matrix(inst), atol=1e-9)


def test_closed_form_with_three_columns():
    inst = build_states(mub_prime_power(3).truncate(3), oa_trivial(3, 3))
    closed = alice_basis_trivial_example(inst)
    np.testing.assert_allclose(overlap_matrix(inst, closed), h_from_oa(inst.oa), atol=1e-9)


def test_closed_form_refuses_other_arrays():
    with pytest.raises(MeanKingError):
        alice_basis_trivial_example(instance(3, 4, "mols"))


def test_povm_properties():
    inst = instance(3, 4, "mols")
    povm = povm_compress(inst)
    assert povm.shape == (9, 9, 9)
    np.testing.assert_allclose(povm.sum(axis=0), np.eye(9), atol=1e-10)
    traces = np.trace(povm, axis1=1, axis2=2).real
    assert np.all(traces >= -1e-12) and np.all(traces <= 1 + 1e-12)
    assert all(np.linalg.matrix_rank(M, tol=1e-10) <= 1 for M in povm)


def test_povm_with_ancilla_is_not_projective():
    inst = instance(2, 2, "trivial")
    povm = povm_compress(inst)
    np.testing.assert_allclose(povm.sum(axis=0), np.eye(4), atol=1e-12)


def test_broken_basis_lowers_success():
    inst = instance(3, 4, "mols")
    basis = inst.alice_basis.copy()
    # rotate |0> and |1> into each other; s(0, A) != s(1, A) for some A
    c = np.cos(0.3)
    s = np.sin(0.3)
    basis[[0, 1]] = np.array([[c, s], [-s, c]]) @ basis[[0, 1]]
    broken = inst.with_basis(basis)
    assert success_exact(broken).worst < 1 - 1e-3


def test_non_prime_power_full_pipeline():
    inst = instance(6, 2, "trivial")
    np.testing.assert_allclose(success_exact(inst).success, 1, atol=1e-9)


def test_simulation_all_succeed_and_deterministic():
    inst = instance(2, 3, "mols")
    a = simulate_rounds(inst, 10_000, 3)
    b = simulate_rounds(inst, 10_000, 3)
    assert a.wins.sum() == 10_000
    np.testing.assert_array_equal(a.trials, b.trials)


def test_simulation_partially_shifted_estimation():
    inst = instance(3, 4, "mols")
    s = inst.estimation.copy()
    s[:, 0] = (s[:, 0] + 1) % 3
    exact = success_exact(inst, s)
    np.testing.assert_allclose(exact.success[0], 0, atol=1e-12)
    np.testing.assert_allclose(exact.success[1:], 1, atol=1e-9)
    rounds = 10_000
    sim = simulate_rounds(inst, rounds, 11, s)
    p = exact.overall
    sigma = np.sqrt(p * (1 - p) / rounds)
    assert abs(sim.overall - p) <= 3 * sigma


def test_simulation_rejects_zero_rounds():
    with pytest.raises(MeanKingError):
        simulate_rounds(instance(2, 2, "trivial"), 0, 1)


def test_simulation_needs_basis():
    inst = build_states(mub_prime_power(3), oa_mols(3))
    with pytest.raises(MeanKingError):
        simulate_rounds(inst, 10, 1)
