from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from matcorrect.correction import Trace, oracle_product

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def scratch_indicators(A, B, C, V):
    """Indicators from the explicit difference AB - C (forms AB on purpose)."""
    M = oracle_product(A, B) - C
    V = V.astype(M.dtype)
    return M @ V, V.T @ M


def exact_det(rows) -> Fraction:
    """Determinant over Q by fraction-valued elimination."""
    A = [[Fraction(int(v)) for v in r] for r in rows]
    size, det = len(A), Fraction(1)
    for c in range(size):
        pivot = next((r for r in range(c, size) if A[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            A[c], A[pivot] = A[pivot], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, size):
            f = A[r][c] / A[c][c]
            A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return det


def left_null_vector(V_rows) -> list[int]:
    """Integer w with w @ V_rows == 0 for a (m+1) x m matrix, via cofactors."""
    rows = [list(r) for r in V_rows]
    return [
        int((-1) ** t * exact_det(rows[:t] + rows[t + 1 :]))
        for t in range(len(rows))
    ]


class ConsistencyTrace(Trace):
    """Asserts the live indicators equal the from-scratch ones after each update."""

    def __init__(self):
        self.updates = 0
        self.picks: list[tuple[str, int]] = []

    def on_update(self, i, j, A, B, C, rows, cols, cert):
        IR, IC = scratch_indicators(A, B, C, cert.V)
        assert np.array_equal(rows.values, IR), f"row indicator stale after ({i}, {j})"
        assert np.array_equal(cols.values, IC), f"column indicator stale after ({i}, {j})"
        assert np.array_equal(rows.counts, np.count_nonzero(IR, axis=1))
        assert np.array_equal(cols.counts, np.count_nonzero(IC, axis=0))
        self.updates += 1

    def on_pick(self, kind, index, A, B, C):
        self.picks.append((kind, index))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
