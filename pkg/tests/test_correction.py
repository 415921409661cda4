import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ConsistencyTrace, left_null_vector
from matcorrect.core_math import CapacityError, build_certificate
from matcorrect.correction import (
    PreconditionError,
    Trace,
    correct_baseline,
    correct_fast,
    freivalds_verify,
    oracle_product,
    recompute_column,
    recompute_entry,
    recompute_row,
)
from matcorrect.counting import OpCounter
from matcorrect.indicators import col_indicator, row_indicator
from matcorrect.harness import InjectionSpec, inject_errors, random_instance

I2 = np.eye(2, dtype=np.int64)
P2 = np.array([[0, 1], [1, 0]])
M2 = np.array([[1, 2], [3, 4]])


def test_oracle_product():
    assert np.array_equal(oracle_product(I2, I2), I2)
    assert oracle_product(M2, P2).tolist() == [[2, 1], [4, 3]]
    assert not oracle_product(M2, np.zeros((2, 2), dtype=np.int64)).any()
    with pytest.raises(ValueError):
        oracle_product(M2, np.ones((3, 3)))


def test_oracle_product_triple_loop(rng):
    A = rng.integers(-50, 51, size=(5, 7))
    B = rng.integers(-50, 51, size=(7, 3))
    expected = [[sum(int(A[i, t]) * int(B[t, j]) for t in range(7)) for j in range(3)] for i in range(5)]
    assert oracle_product(A, B).tolist() == expected


def test_recompute_helpers():
    assert recompute_entry(I2, I2, 0, 0) == 1
    assert recompute_row(M2, I2, 1).tolist() == [3, 4]
    assert recompute_column(M2, P2, 0).tolist() == [2, 4]
    ops = OpCounter()
    recompute_entry(M2, P2, 0, 0, ops)
    assert (ops.mults, ops.adds) == (2, 1)
    recompute_row(M2, P2, 0, ops)
    assert (ops.mults, ops.adds) == (6, 3)
    with pytest.raises(IndexError):
        recompute_row(M2, P2, 2)


def instance(n, k, pattern="uniform", seed=0, alpha=20):
    A, B, P = random_instance(n, alpha, seed)
    C, truth = inject_errors(P, InjectionSpec(k, pattern, seed + 1))
    return A, B, C, P, truth


@pytest.mark.parametrize("correct", [correct_baseline, correct_fast])
def test_exact_product_untouched(correct):
    A, B, C, P, _ = instance(8, 0)
    report = correct(A, B, C, 5)
    assert np.array_equal(C, P)
    assert report.corrected_entries == []
    assert report.rows_recomputed == report.cols_recomputed == 0


def test_baseline_single_error():
    A, B, P = random_instance(4, 9, 3)
    C = P.copy()
    C[1, 2] += 4
    report = correct_baseline(A, B, C, 4)
    assert np.array_equal(C, P)
    assert report.rows_recomputed == 1 and report.cols_recomputed == 1
    assert [(e.row, e.col, e.old, e.new) for e in report.corrected_entries] == [(1, 2, P[1, 2] + 4, P[1, 2])]


def test_baseline_cross_costs_k_lines():
    n, k = 16, 8
    A, B, C, P, _ = instance(n, k, "cross", seed=4)
    ops = OpCounter()
    report = correct_baseline(A, B, C, k, ops)
    assert np.array_equal(C, P)
    assert report.rows_recomputed + report.cols_recomputed >= k
    assert ops.total - report.phase_ops["indicators"] >= k * n * (2 * n - 1) / 2


@pytest.mark.parametrize("pattern", ["uniform", "cross", "row-heavy", "scatter"])
@pytest.mark.parametrize("seed", range(4))
def test_fast_matches_oracle(pattern, seed):
    A, B, C, P, truth = instance(32, 25, pattern, seed)
    report = correct_fast(A, B, C, 25)
    assert np.array_equal(C, P)
    assert report.corrected_positions == {(i, j) for i, j, _ in truth}


@settings(max_examples=80, deadline=None)
@given(
    st.integers(1, 20),
    st.integers(0, 30),
    st.sampled_from(["uniform", "cross", "row-heavy"]),
    st.integers(0, 2**31),
    st.booleans(),
)
def test_both_algorithms_exact(n, k, pattern, seed, refresh):
    k = min(k, n * n)
    if pattern == "cross" and (k + 1) // 2 > n - 1:
        pattern = "uniform"
    A, B, C, P, _ = instance(n, k, pattern, seed, alpha=30)
    C2 = C.copy()
    correct_baseline(A, B, C, k)
    correct_fast(A, B, C2, k, refresh=refresh)
    assert np.array_equal(C, P) and np.array_equal(C2, P)


def test_refresh_gives_same_result():
    A, B, C, P, _ = instance(24, 16, "row-heavy", 9)
    C2 = C.copy()
    r1 = correct_fast(A, B, C, 16)
    r2 = correct_fast(A, B, C2, 16, refresh=True)
    assert np.array_equal(C, C2)
    assert r1.corrected_positions == r2.corrected_positions
    assert r2.ops.total > r1.ops.total


def test_report_has_no_duplicate_entries():
    A, B, C, P, _ = instance(20, 36, "row-heavy", 2)
    report = correct_fast(A, B, C, 36)
    positions = [(e.row, e.col) for e in report.corrected_entries]
    assert len(positions) == len(set(positions))
    assert all(e.old != e.new for e in report.corrected_entries)


class PickAudit(Trace):
    """Checks the residual sparsity of every picked line against the oracle."""

    def __init__(self, m):
        self.m = m
        self.picks = []

    def on_pick(self, kind, index, A, B, C):
        M = oracle_product(A, B) - C
        line = M[index] if kind == "row" else M[:, index]
        if kind == "row":
            assert 0 < np.count_nonzero(line) <= self.m
        self.picks.append((kind, index))


@pytest.mark.parametrize("seed", range(10))
def test_picked_rows_are_sparse_and_unique(seed):
    n, k = 24, 49
    A, B, C, P, _ = instance(n, k, "row-heavy" if seed % 2 else "uniform", seed)
    audit = PickAudit(math.isqrt(k))
    correct_fast(A, B, C, k, trace=audit)
    assert np.array_equal(C, P)
    assert len(audit.picks) == len(set(audit.picks))


def figure_instance():
    """Errors shaped like the worked example: n=6, sqrt(k)=4 (k=16).

    Row 2 and columns 2, 4 (1-based) carry five errors each, chosen in the
    left kernel of the certificate so the initial indicators miss them.
    """
    n, m = 6, 4
    V = build_certificate(n, m).V.tolist()
    w15 = left_null_vector(V[0:5])  # points 1..5
    w26 = left_null_vector(V[1:6])  # points 2..6
    assert all(w15) and all(w26)
    # row 2 = a*w15, column 4 = b*w15 (rows 1..5), column 2 = c*w26 (rows 2..6)
    # shared cells: (2,4): a*w15[3] == b*w15[1]; (2,2): a*w15[1] == c*w26[0]
    a = abs(w15[1] * w26[0])
    b, rem_b = divmod(a * w15[3], w15[1])
    c, rem_c = divmod(a * w15[1], w26[0])
    assert rem_b == rem_c == 0
    M = np.zeros((n, n), dtype=np.int64)
    M[1, :5] = [a * w for w in w15]
    M[:5, 3] = [b * w for w in w15]
    M[1:, 1] = [c * w for w in w26]
    assert M[1, 3] == a * w15[3] and M[1, 1] == a * w15[1]
    rng = np.random.default_rng(1)
    A = rng.integers(-9, 10, size=(n, n))
    B = rng.integers(-9, 10, size=(n, n))
    P = oracle_product(A, B)
    return A, B, P - M, P, M


def test_figure_scenario():
    A, B, C, P, M = figure_instance()
    support = (M != 0).astype(int).tolist()
    assert support == [
        [0, 0, 0, 1, 0, 0],
        [1, 1, 1, 1, 1, 0],
        [0, 1, 0, 1, 0, 0],
        [0, 1, 0, 1, 0, 0],
        [0, 1, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 0],
    ]

    cert = build_certificate(6, 4)
    assert row_indicator(A, B, C, cert).detected == [0, 2, 3, 4, 5]
    assert col_indicator(A, B, C, cert).detected == [0, 2, 4]

    trace = ConsistencyTrace()
    report = correct_fast(A, B, C, 16, trace=trace)
    assert np.array_equal(C, P)
    # S0 = {1,3,4,5,6} and T0 = {1,3,5}; phase 1 finds nothing to fix.
    assert not [e for e in report.corrected_entries if e.phase == "phase1"]
    # Picking row 1 fixes column 4, picking row 3 fixes column 2, then
    # column 1 exposes the rest of row 2.
    assert trace.picks == [("row", 0), ("row", 2), ("column", 0)]
    by_phase = {}
    for e in report.corrected_entries:
        by_phase.setdefault(e.phase, set()).add((e.row, e.col))
    assert by_phase["phase2-row-sweep"] == {(r, 3) for r in range(5)} | {(r, 1) for r in range(1, 6)}
    assert by_phase["phase2-col-sweep"] == {(1, 0), (1, 2), (1, 4)}


def test_figure_live_sets_after_first_pick():
    A, B, C, P, M = figure_instance()

    class Snapshot(Trace):
        def __init__(self):
            self.rows_at_pick = []
            self.state = None

        def on_update(self, i, j, A, B, C, rows, cols, cert):
            self.state = rows

        def on_pick(self, kind, index, A, B, C):
            if kind == "row" and self.state is not None:
                self.rows_at_pick.append(set(self.state.detected) & {0, 2, 3, 4, 5})

    snap = Snapshot()
    correct_fast(A, B, C, 16, trace=snap)
    assert snap.rows_at_pick == [{2, 3, 4, 5}]


def test_precondition_violation_is_reported():
    # Twelve unit errors against a declared bound of one; with this seed the
    # indicators still flag a line once both sweeps are done.
    A, B, P = random_instance(6, 5, 35)
    C, _ = inject_errors(P, InjectionSpec(12, "uniform", 35, (-1, 1)))
    with pytest.raises(PreconditionError) as info:
        correct_fast(A, B, C, 1)
    assert info.value.report.algorithm == "fast"
    assert not np.array_equal(C, P)


def test_capacity_violation():
    big = np.full((4, 4), 2**31, dtype=np.int64)
    with pytest.raises(CapacityError):
        correct_fast(big, big, big.copy(), 1)
    with pytest.raises(CapacityError):
        correct_baseline(big, big, big.copy(), 1)


def test_bigint_correction():
    n = 6
    A = np.array([[(i + 1) * 2**40 + j for j in range(n)] for i in range(n)], dtype=object)
    B = np.array([[2**35 - i * j for j in range(n)] for i in range(n)], dtype=object)
    P = oracle_product(A, B)
    C = P.copy()
    C[2, 3] += 1
    C[4, 0] -= 2**70
    report = correct_fast(A, B, C, 4)
    assert all(int(x) == int(y) for x, y in zip(C.flat, P.flat))
    assert report.corrected_positions == {(2, 3), (4, 0)}


def test_freivalds_accepts_equal(rng):
    for seed in range(10):
        A, B, P = random_instance(6, 10, seed)
        assert freivalds_verify(A, B, P, 10, seed)


def test_freivalds_forced_vector_hits_error():
    C = I2.copy()
    C[0, 1] = 5
    assert not freivalds_verify(I2, I2, C, vectors=np.array([0, 1]))
    assert freivalds_verify(I2, I2, C, vectors=np.array([1, 0]))


def test_freivalds_rejects_single_error():
    A, B, P = random_instance(16, 10, 0)
    C = P.copy()
    C[3, 7] += 1
    accepted = sum(freivalds_verify(A, B, C, 30, seed) for seed in range(1000))
    assert accepted <= 1


def test_freivalds_bad_input():
    with pytest.raises(ValueError):
        freivalds_verify(I2, I2, I2, trials=0)
    with pytest.raises(ValueError):
        freivalds_verify(I2, np.eye(3), I2)
