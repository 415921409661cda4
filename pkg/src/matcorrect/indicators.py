"""Row and column indicators of AB - C, kept current under single-entry fixes.

The row indicator is ``IR = (AB - C) V`` (n x m) and the column indicator is
``IC = V^T (AB - C)`` (m x n). Neither is ever computed by forming AB.
Each state keeps a per-line count of nonzero indicator entries; a line is
*detected* while its count is positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_math import Certificate
from .counting import OpCounter, matmul, subtract


@dataclass
class IndicatorState:
    kind: str  # "row" or "column"
    values: np.ndarray
    counts: np.ndarray

    @property
    def detected(self) -> list[int]:
        """Detected line indices, ascending."""
        return np.flatnonzero(self.counts).tolist()

    def is_detected(self, index: int) -> bool:
        return bool(self.counts[index])

    def line(self, index: int) -> np.ndarray:
        return self.values[index] if self.kind == "row" else self.values[:, index]

    def copy(self) -> IndicatorState:
        return IndicatorState(self.kind, self.values.copy(), self.counts.copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IndicatorState)
            and self.kind == other.kind
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.counts, other.counts)
        )


def _check(A, B, C, cert: Certificate) -> int:
    n = A.shape[0]
    for name, M in (("A", A), ("B", B), ("C", C)):
        if M.shape != (n, n):
            raise ValueError(f"{name} has shape {M.shape}, expected ({n}, {n})")
    if cert.n != n:
        raise ValueError(f"certificate built for n={cert.n}, matrices have n={n}")
    return n


def row_indicator(A, B, C, cert: Certificate, ops: OpCounter | None = None) -> IndicatorState:
    """``IR = A(BV) - CV`` and its detected row set S."""
    _check(A, B, C, cert)
    ops = OpCounter() if ops is None else ops
    V = cert.as_dtype(C.dtype)
    W = matmul(B, V, ops)
    IR = subtract(matmul(A, W, ops), matmul(C, V, ops), ops)
    return IndicatorState("row", IR, np.count_nonzero(IR, axis=1))


def col_indicator(A, B, C, cert: Certificate, ops: OpCounter | None = None) -> IndicatorState:
    """``IC = (V^T A) B - V^T C`` and its detected column set T."""
    _check(A, B, C, cert)
    ops = OpCounter() if ops is None else ops
    Vt = cert.as_dtype(C.dtype).T
    IC = subtract(matmul(matmul(Vt, A, ops), B, ops), matmul(Vt, C, ops), ops)
    return IndicatorState("column", IC, np.count_nonzero(IC, axis=0))


def apply_correction(
    i: int,
    j: int,
    x,
    cert: Certificate,
    rows: IndicatorState,
    cols: IndicatorState,
    ops: OpCounter | None = None,
) -> None:
    """Account for ``C[i, j] += x`` in both indicators, in O(m).

    ``x`` must be ``(AB)[i, j] - C[i, j]`` taken before the caller writes
    the corrected value back into C. The entry of AB - C drops by ``x``, so
    row ``i`` of IR loses ``x * V[j]`` and column ``j`` of IC loses
    ``x * V[i]``.
    """
    n = cert.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"entry ({i}, {j}) outside {n} x {n}")
    if not x:
        return
    ops = OpCounter() if ops is None else ops
    m = cert.m
    V = cert.as_dtype(rows.values.dtype)

    dr = x * V[j]
    rows.values[i] -= dr
    dc = x * V[i]
    cols.values[:, j] -= dc
    ops.count(2 * m, 2 * m)
    ops.observe(dr)
    ops.observe(dc)
    ops.observe(rows.values[i])
    ops.observe(cols.values[:, j])

    rows.counts[i] = np.count_nonzero(rows.values[i])
    cols.counts[j] = np.count_nonzero(cols.values[:, j])
