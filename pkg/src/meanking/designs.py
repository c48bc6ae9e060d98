"""Orthogonal arrays OA_n(k, d).

Row ``I`` of an array doubles as Alice's guessing rule: ``rows[I, A]`` is
her answer when she observed outcome ``I`` and the King announces basis ``A``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, MeanKingError, RowCapError
from .field import field_make, prime_power
from .report import VerificationReport

DEFAULT_ROW_CAP = 100_000


def row_cap() -> int:
    raw = os.environ.get("MEANKING_ROW_CAP")
    if raw is None:
        return DEFAULT_ROW_CAP
    try:
        return int(raw)
    except ValueError:
        raise MeanKingError(f"MEANKING_ROW_CAP must be an integer, got {raw!r}") from None


def _check_rows(count: int):
    cap = row_cap()
    if count > cap:
        raise RowCapError(f"{count} rows exceeds the row cap of {cap} (set MEANKING_ROW_CAP to override)")


@dataclass(frozen=True, eq=False)
class OrthogonalArray:
    n: int
    k: int
    d: int
    rows: np.ndarray

    def __post_init__(self):
        if self.n < 1 or self.k < 2 or self.d < 2:
            raise MeanKingError(f"need n >= 1, k >= 2, d >= 2; got n={self.n}, k={self.k}, d={self.d}")
        r = np.asarray(self.rows)
        if r.ndim != 2 or r.shape != (self.n * self.d ** 2, self.k):
            raise DimensionError(
                f"OA_{self.n}({self.k},{self.d}) needs shape ({self.n * self.d ** 2}, {self.k}), got {r.shape}")
        _check_rows(r.shape[0])
        if not np.issubdtype(r.dtype, np.integer):
            raise MeanKingError("array entries must be integers")
        if r.size and (r.min() < 0 or r.max() >= self.d):
            raise MeanKingError(f"array entries must lie in 0..{self.d - 1}")
        r = np.ascontiguousarray(r, dtype=np.int64)
        r.setflags(write=False)
        object.__setattr__(self, "rows", r)

    def columns(self, cols) -> OrthogonalArray:
        """Sub-array on the given columns; any >= 2 columns of an OA form an OA."""
        cols = list(cols)
        return OrthogonalArray(self.n, len(cols), self.d, self.rows[:, cols])


def oa_trivial(k: int, d: int) -> OrthogonalArray:
    """All k-tuples; row I has digit A of I (base d) in column A, so n = d^(k-2)."""
    if k < 2 or d < 2:
        raise MeanKingError(f"need k >= 2 and d >= 2, got k={k}, d={d}")
    _check_rows(d ** k)
    I = np.arange(d ** k)
    rows = np.stack([(I // d ** A) % d for A in range(k)], axis=1)
    return OrthogonalArray(d ** (k - 2), k, d, rows)


def oa_mols(d: int) -> OrthogonalArray:
    """OA_1(d+1, d) from the d-1 linear Latin squares over GF(d).

    Rows run over (i, j) in GF(d)^2, i major; the columns are
    i, j, then A*i + j for each nonzero A in canonical order.
    """
    pm = prime_power(d)
    if pm is None:
        raise MeanKingError(f"{d} is not a prime power")
    F = field_make(*pm)
    add, mul = F.add_table, F.mul_table
    i, j = np.divmod(np.arange(d * d), d)
    cols = [i, j] + [add[mul[A, i], j] for A in range(1, d)]
    return OrthogonalArray(1, d + 1, d, np.stack(cols, axis=1))


def oa_verify(t: OrthogonalArray) -> VerificationReport:
    """Exact integer check that every column pair shows each symbol pair n times."""
    return oa_verify_rows(t.n, t.k, t.d, t.rows)


def oa_verify_rows(n: int, k: int, d: int, rows) -> VerificationReport:
    """``oa_verify`` for a raw table that may not even have n*d^2 rows."""
    rows = np.ascontiguousarray(rows, dtype=np.int64).reshape(-1, k)
    if rows.size and (rows.min() < 0 or rows.max() >= d):
        raise MeanKingError(f"array entries must lie in 0..{d - 1}")
    counts = kernels.pair_counts(rows, d)
    violations = []
    worst = 0
    if rows.shape[0] != n * d * d:
        violations.append({"kind": "rows", "count": rows.shape[0], "expected": n * d * d})
        worst = abs(rows.shape[0] - n * d * d)
    for A in range(k):
        col = np.diagonal(counts[A, A])
        for a in np.nonzero(col != n * d)[0]:
            violations.append({"kind": "column", "A": A, "a": int(a), "count": int(col[a]), "expected": n * d})
            worst = max(worst, abs(int(col[a]) - n * d))
    for A in range(k):
        for B in range(A + 1, k):
            block = counts[A, B]
            for a, b in zip(*np.nonzero(block != n)):
                violations.append({"kind": "pair", "A": A, "A_prime": B, "a": int(a), "a_prime": int(b),
                                   "count": int(block[a, b]), "expected": n})
                worst = max(worst, abs(int(block[a, b]) - n))
    detail = ""
    if violations:
        v = next((x for x in violations if x["kind"] == "pair"), violations[0])
        if v["kind"] == "pair":
            detail = f"(A={v['A']},A'={v['A_prime']},a={v['a']},a'={v['a_prime']}): count {v['count']} != {n}"
        elif v["kind"] == "column":
            detail = f"column {v['A']} symbol {v['a']}: count {v['count']} != {n * d}"
        else:
            detail = f"{v['count']} rows, expected {v['expected']}"
    return VerificationReport(
        "oa_counting", not violations, float(worst), 0.0, detail=detail,
        data={"n": n, "k": k, "d": d, "violations": violations[:50], "violation_count": len(violations)},
    )


def oa_to_text(t: OrthogonalArray) -> str:
    lines = [f"OA {t.n} {t.k} {t.d}"]
    lines += [" ".join(str(int(x)) for x in row) for row in t.rows]
    return "\n".join(lines) + "\n"


def read_oa_text(text: str) -> tuple[int, int, int, np.ndarray]:
    """Parse the text format without insisting on n*d^2 rows."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MeanKingError("empty OA file")
    head = lines[0].split(" ")
    if len(head) != 4 or head[0] != "OA":
        raise MeanKingError(f"bad header line {lines[0]!r}, expected 'OA <n> <k> <d>'")
    try:
        n, k, d = (int(x) for x in head[1:])
    except ValueError:
        raise MeanKingError(f"bad header line {lines[0]!r}") from None
    if n < 1 or k < 2 or d < 2:
        raise MeanKingError(f"bad OA parameters n={n}, k={k}, d={d}")
    body = lines[1:]
    _check_rows(max(len(body), n * d * d))
    rows = []
    for lineno, line in enumerate(body, start=2):
        parts = line.split(" ")
        if len(parts) != k:
            raise MeanKingError(f"line {lineno}: expected {k} entries, got {len(parts)}")
        try:
            rows.append([int(x) for x in parts])
        except ValueError:
            raise MeanKingError(f"line {lineno}: non-integer entry") from None
    return n, k, d, np.array(rows, dtype=np.int64).reshape(-1, k)


def oa_from_text(text: str) -> OrthogonalArray:
    n, k, d, rows = read_oa_text(text)
    if rows.shape[0] != n * d * d:
        raise MeanKingError(f"expected {n * d * d} rows, found {rows.shape[0]}")
    return OrthogonalArray(n, k, d, rows)
