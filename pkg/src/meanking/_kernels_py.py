"""numpy implementations of the compiled kernels, used when the extension is absent."""

import numpy as np


def pair_counts(rows, d):
    n_rows, k = rows.shape
    counts = np.zeros((k, k, d, d), dtype=np.int64)
    for A in range(k):
        for B in range(k):
            flat = np.bincount(rows[:, A] * d + rows[:, B], minlength=d * d)
            counts[A, B] = flat.reshape(d, d)
    return counts


def complete_basis(given, dim, threshold):
    m = given.shape[0]
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[:m] = given
    count = m
    for j in range(dim):
        if count >= dim:
            break
        Q = out[:count]
        v = -Q[:, j].conj() @ Q
        v[j] += 1
        v -= (Q.conj() @ v) @ Q
        norm = np.linalg.norm(v)
        if norm > threshold:
            out[count] = v / norm
            count += 1
    return count, out


_CHUNK = 4096


def sample_rounds(u, cdf_A, cdf_a, cdf_I, s):
    k, d = cdf_a.shape
    trials = np.zeros((k, d), dtype=np.int64)
    wins = np.zeros((k, d), dtype=np.int64)
    for start in range(0, u.shape[0], _CHUNK):
        uu = u[start:start + _CHUNK]
        A = np.searchsorted(cdf_A, uu[:, 0], side="right")
        a = (cdf_a[A] <= uu[:, 1:2]).sum(axis=1)
        I = (cdf_I[A, a] <= uu[:, 2:3]).sum(axis=1)
        np.add.at(trials, (A, a), 1)
        hit = s[I, A] == a
        np.add.at(wins, (A[hit], a[hit]), 1)
    return trials, wins
