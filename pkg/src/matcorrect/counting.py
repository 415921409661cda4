"""Operation counting for the correction kernels.

Counts are analytic: a length-n dot product is n multiplications and n - 1
additions, whatever numpy does underneath. They are therefore exact and
reproducible across machines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class OpCounter:
    mults: int = 0
    adds: int = 0
    peak: int = 0  # largest |value| produced by any counted kernel

    @property
    def total(self) -> int:
        return self.mults + self.adds

    def count(self, mults: int = 0, adds: int = 0) -> None:
        self.mults += mults
        self.adds += adds

    def observe(self, values) -> None:
        if np.ndim(values) == 0:
            v = abs(int(values))
        elif np.size(values):
            v = int(np.max(np.abs(values)))
        else:
            return
        if v > self.peak:
            self.peak = v

    def snapshot(self) -> OpCounter:
        return OpCounter(self.mults, self.adds, self.peak)


def matmul(X: np.ndarray, Y: np.ndarray, ops: OpCounter) -> np.ndarray:
    a, b = X.shape
    b2, c = Y.shape
    if b != b2:
        raise ValueError(f"cannot multiply {X.shape} by {Y.shape}")
    Z = X @ Y
    ops.count(a * b * c, a * (b - 1) * c)
    ops.observe(Z)
    return Z


def subtract(X: np.ndarray, Y: np.ndarray, ops: OpCounter) -> np.ndarray:
    Z = X - Y
    ops.count(adds=Z.size)
    ops.observe(Z)
    return Z
