"""Primes, Vandermonde certificates and integer-capacity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INT64_MAX = int(np.iinfo(np.int64).max)


class CapacityError(ValueError):
    """Raised when values could overflow the int64 backend."""


def smallest_prime_above(n: int) -> int:
    """Smallest prime strictly greater than ``n``, found by sieving [2, 2n+2]."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    limit = 2 * n + 2
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    above = np.flatnonzero(sieve[n + 1 :])
    return int(above[0]) + n + 1


@dataclass(frozen=True)
class Certificate:
    """n x m matrix with ``V[r, e] = (r + 1) ** e mod p``.

    Row ``r`` (0-based) is the power sequence of the point ``r + 1``, so no
    entry is ever zero: ``1 <= r + 1 <= n < p``.
    """

    p: int
    m: int
    n: int
    V: np.ndarray

    def as_dtype(self, dtype) -> np.ndarray:
        return self.V if self.V.dtype == dtype else self.V.astype(dtype)


def certificate_width(k: int) -> int:
    if k < 0:
        raise ValueError(f"error bound must be non-negative, got {k}")
    return 1 if k == 0 else math.isqrt(k - 1) + 1


def build_certificate(n: int, m: int) -> Certificate:
    if n < 1 or m < 1:
        raise ValueError(f"certificate needs n >= 1 and m >= 1, got n={n}, m={m}")
    p = smallest_prime_above(n)
    V = np.empty((n, m), dtype=np.int64)
    x = np.arange(1, n + 1, dtype=np.int64)
    V[:, 0] = 1
    for e in range(1, m):
        V[:, e] = V[:, e - 1] * x % p
    V.setflags(write=False)
    return Certificate(p=p, m=m, n=n, V=V)


def vandermonde_det_mod(xs, p: int) -> int:
    """Determinant of the Vandermonde matrix of ``xs`` modulo ``p``."""
    xs = [int(x) for x in xs]
    if len(set(xs)) != len(xs):
        raise ValueError(f"points must be distinct, got {xs}")
    det = 1
    for j in range(len(xs)):
        for i in range(j):
            det = det * (xs[j] - xs[i]) % p
    return det


def det_mod(M, p: int) -> int:
    """Determinant of a square integer matrix over Z/pZ by Gaussian elimination."""
    A = [[int(v) % p for v in row] for row in np.asarray(M).tolist()]
    size = len(A)
    det = 1
    for c in range(size):
        pivot = next((r for r in range(c, size) if A[r][c]), None)
        if pivot is None:
            return 0
        if pivot != c:
            A[c], A[pivot] = A[pivot], A[c]
            det = -det
        det = det * A[c][c] % p
        inv = pow(A[c][c], -1, p)
        for r in range(c + 1, size):
            f = A[r][c] * inv % p
            if f:
                A[r] = [(a - f * b) % p for a, b in zip(A[r], A[c])]
    return det % p


def max_abs(*arrays) -> int:
    return max((int(np.max(np.abs(a))) if np.size(a) else 0) for a in arrays)


def value_bound(A, B, C) -> int:
    """Bound 4 * alpha^2 * n^3 on every intermediate of the correction run."""
    n = A.shape[0]
    alpha = max_abs(A, B, C)
    return 4 * alpha * alpha * n**3


def is_bigint(*arrays) -> bool:
    return any(a.dtype == object for a in arrays)


def check_capacity(A, B, C) -> int:
    """Return the value bound, raising CapacityError if int64 cannot hold it."""
    bound = value_bound(A, B, C)
    if not is_bigint(A, B, C) and bound > INT64_MAX:
        raise CapacityError(
            f"value bound 4*alpha^2*n^3 = {bound} exceeds int64; use bigint mode"
        )
    return bound


def as_matrix(data, bigint: bool = False) -> np.ndarray:
    """Coerce nested sequences to a 2-D integer matrix (int64 or Python ints)."""
    if bigint:
        M = np.array(data, dtype=object)
        if M.ndim == 2:
            M = np.vectorize(int, otypes=[object])(M) if M.size else M
    else:
        M = np.array(data)
        if M.dtype == object:
            if any(abs(int(v)) > INT64_MAX for v in M.flat):
                raise CapacityError("entry magnitude exceeds int64; use bigint mode")
        elif M.size and not np.issubdtype(M.dtype, np.integer):
            raise TypeError(f"integer entries required, got {M.dtype}")
        M = M.astype(np.int64)
    if M.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got shape {M.shape}")
    return M
