"""Correcting an integer product C ~ AB with at most k wrong entries.

``correct_baseline`` recomputes every detected row and column. It is
simple but costs O(k n^2). ``correct_fast`` runs in two phases and keeps
the indicators current, which brings the cost to O(sqrt(k) n^2 + k^2 n).
Both mutate ``C`` in place. Indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_math import (
    Certificate,
    build_certificate,
    certificate_width,
    check_capacity,
)
from .counting import OpCounter
from .indicators import IndicatorState, apply_correction, col_indicator, row_indicator

PHASES = ("phase1", "phase2-row-sweep", "phase2-col-sweep", "baseline")


class PreconditionError(RuntimeError):
    """The indicators did not clear, so AB - C had more than k nonzeros."""

    def __init__(self, message: str, report: CorrectionReport):
        super().__init__(message)
        self.report = report


@dataclass
class CorrectedEntry:
    row: int
    col: int
    old: int
    new: int
    phase: str


@dataclass
class CorrectionReport:
    algorithm: str
    n: int
    k: int
    m: int
    p: int
    corrected_entries: list[CorrectedEntry] = field(default_factory=list)
    rows_recomputed: int = 0
    cols_recomputed: int = 0
    ops: OpCounter = field(default_factory=OpCounter)
    phase_ops: dict[str, int] = field(default_factory=dict)
    value_bound: int = 0
    verified: bool | None = None

    @property
    def corrected_positions(self) -> set[tuple[int, int]]:
        return {(e.row, e.col) for e in self.corrected_entries}


class Trace:
    """Hooks for instrumented runs. The default implementation does nothing."""

    def on_update(self, i, j, A, B, C, rows, cols, cert) -> None:
        """Called after C[i, j] was written back and the indicators updated."""

    def on_pick(self, kind, index, A, B, C) -> None:
        """Called when the fast algorithm picks a detected row or column."""


def _square(A, B, C=None) -> int:
    n = A.shape[0]
    shapes = [A.shape, B.shape] + ([] if C is None else [C.shape])
    if any(s != (n, n) for s in shapes):
        raise ValueError(f"expected square matrices of equal size, got {shapes}")
    return n


def oracle_product(A, B) -> np.ndarray:
    """Schoolbook AB, accumulated one rank-1 update at a time."""
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
    dtype = object if object in (A.dtype, B.dtype) else np.int64
    P = np.zeros((A.shape[0], B.shape[1]), dtype=dtype)
    for t in range(A.shape[1]):
        P += np.multiply.outer(A[:, t], B[t, :])
    return P


def recompute_entry(A, B, i: int, j: int, ops: OpCounter | None = None):
    n = A.shape[1]
    value = A[i, :] @ B[:, j]
    if ops is not None:
        ops.count(n, n - 1)
        ops.observe(value)
    return value


def recompute_row(A, B, i: int, ops: OpCounter | None = None) -> np.ndarray:
    n = A.shape[1]
    row = A[i, :] @ B
    if ops is not None:
        ops.count(n * B.shape[1], (n - 1) * B.shape[1])
        ops.observe(row)
    return row


def recompute_column(A, B, j: int, ops: OpCounter | None = None) -> np.ndarray:
    n = A.shape[1]
    col = A @ B[:, j]
    if ops is not None:
        ops.count(n * A.shape[0], (n - 1) * A.shape[0])
        ops.observe(col)
    return col


def _setup(algorithm, A, B, C, k, ops):
    n = _square(A, B, C)
    bound = check_capacity(A, B, C)
    ops = OpCounter() if ops is None else ops
    cert = build_certificate(n, certificate_width(k))
    report = CorrectionReport(algorithm, n, k, cert.m, cert.p, ops=ops, value_bound=bound)
    return cert, ops, report


def _record(report, i, j, old, new, phase) -> None:
    if old != new:
        report.corrected_entries.append(CorrectedEntry(int(i), int(j), int(old), int(new), phase))


def correct_baseline(A, B, C, k: int, ops: OpCounter | None = None) -> CorrectionReport:
    """Recompute all of (S x [n]) u ([n] x T), each entry exactly once."""
    cert, ops, report = _setup("baseline", A, B, C, k, ops)
    n = report.n
    S = row_indicator(A, B, C, cert, ops).detected
    T = col_indicator(A, B, C, cert, ops).detected
    report.phase_ops["indicators"] = ops.total

    for i in S:
        row = recompute_row(A, B, i, ops)
        for j in np.flatnonzero(row != C[i]):
            _record(report, i, j, C[i, j], row[j], "baseline")
        C[i] = row
    report.rows_recomputed = len(S)

    rest = np.setdiff1d(np.arange(n), S)
    for j in T:
        for i in rest:
            value = recompute_entry(A, B, i, j, ops)
            _record(report, i, j, C[i, j], value, "baseline")
            C[i, j] = value
    report.cols_recomputed = len(T)
    report.phase_ops["baseline"] = ops.total - report.phase_ops["indicators"]
    return report


def _sweep(kind, A, B, C, cert, first, live, other, ops, report, trace) -> None:
    """Clear every line of ``first`` that is still detected in ``live``.

    For a row sweep, ``live`` is the row state: the smallest detected row is
    recomputed, its wrong columns are found, and those columns are corrected
    one entry at a time through ``apply_correction``.
    """
    phase = f"phase2-{'row' if kind == 'row' else 'col'}-sweep"
    rows, cols = (live, other) if kind == "row" else (other, live)
    n = cert.n
    while True:
        index = next((t for t in first if live.counts[t]), None)
        if index is None:
            return
        trace.on_pick(kind, index, A, B, C)
        if kind == "row":
            wrong = np.flatnonzero(recompute_row(A, B, index, ops) != C[index])
            report.rows_recomputed += 1
        else:
            wrong = np.flatnonzero(recompute_column(A, B, index, ops) != C[:, index])
            report.cols_recomputed += 1
        if not len(wrong):
            raise PreconditionError(f"{kind} {index} detected but has no wrong entry", report)
        for w in wrong:
            if kind == "row":
                line = recompute_column(A, B, w, ops)
                report.cols_recomputed += 1
                cells = ((t, w) for t in range(n))
            else:
                line = recompute_row(A, B, w, ops)
                report.rows_recomputed += 1
                cells = ((w, t) for t in range(n))
            for t, (i, j) in enumerate(cells):
                x = line[t] - C[i, j]
                apply_correction(i, j, x, cert, rows, cols, ops)
                _record(report, i, j, C[i, j], line[t], phase)
                C[i, j] = line[t]
                trace.on_update(i, j, A, B, C, rows, cols, cert)


def correct_fast(
    A,
    B,
    C,
    k: int,
    ops: OpCounter | None = None,
    *,
    refresh: bool = False,
    trace: Trace | None = None,
) -> CorrectionReport:
    """Two-phase correction in O(sqrt(k) n^2 + k^2 n) operations.

    Phase 1 fixes every entry in a detected row *and* a detected column of
    the initial indicators, updating the indicators as it goes. Phase 2
    sweeps the initially detected rows, then the initially detected
    columns, while the live indicators still flag them.

    With ``refresh=True`` the indicators are recomputed from scratch between
    the phases instead of being carried over; the result is identical.

    Raises PreconditionError when an indicator is still nonzero at the end,
    which proves C != AB (more than k errors were present).
    """
    cert, ops, report = _setup("fast", A, B, C, k, ops)
    trace = Trace() if trace is None else trace
    rows = row_indicator(A, B, C, cert, ops)
    cols = col_indicator(A, B, C, cert, ops)
    S0, T0 = rows.detected, cols.detected
    report.phase_ops["indicators"] = mark = ops.total

    for i in S0:
        for j in T0:
            value = recompute_entry(A, B, i, j, ops)
            x = value - C[i, j]
            if x:
                apply_correction(i, j, x, cert, rows, cols, ops)
                _record(report, i, j, C[i, j], value, "phase1")
                C[i, j] = value
                trace.on_update(i, j, A, B, C, rows, cols, cert)
    report.phase_ops["phase1"] = ops.total - mark
    mark = ops.total

    if refresh:
        rows = row_indicator(A, B, C, cert, ops)
        cols = col_indicator(A, B, C, cert, ops)
        report.phase_ops["refresh"] = ops.total - mark
        mark = ops.total

    _sweep("row", A, B, C, cert, S0, rows, cols, ops, report, trace)
    report.phase_ops["phase2-row-sweep"] = ops.total - mark
    mark = ops.total
    _sweep("column", A, B, C, cert, T0, cols, rows, ops, report, trace)
    report.phase_ops["phase2-col-sweep"] = ops.total - mark

    if rows.detected or cols.detected:
        raise PreconditionError(
            f"indicators still flag rows {rows.detected[:8]} / columns "
            f"{cols.detected[:8]}: AB - C had more than k={k} nonzeros",
            report,
        )
    return report


def freivalds_verify(
    A,
    B,
    C,
    trials: int = 30,
    rng_seed: int = 0,
    ops: OpCounter | None = None,
    vectors=None,
) -> bool:
    """Randomized check of AB == C with 0/1 vectors; false positives only.

    ``vectors`` (n x trials) overrides the random draw.
    """
    n = _square(A, B, C)
    if vectors is None:
        if trials < 1:
            raise ValueError(f"trials must be >= 1, got {trials}")
        rng = np.random.default_rng(rng_seed)
        vectors = rng.integers(0, 2, size=(n, trials), dtype=np.int64)
    vectors = np.asarray(vectors).reshape(n, -1)
    if A.dtype == object:
        vectors = vectors.astype(object)
    t = vectors.shape[1]
    ABv = A @ (B @ vectors)
    Cv = C @ vectors
    if ops is not None:
        ops.count(3 * n * n * t, 3 * n * (n - 1) * t)
        ops.observe(ABv)
        ops.observe(Cv)
    return bool(np.array_equal(ABv, Cv))
