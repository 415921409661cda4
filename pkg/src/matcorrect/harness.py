"""Matrix files, error injection, end-to-end runs and benchmarks."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .core_math import INT64_MAX, CapacityError, as_matrix, check_capacity
from .correction import (
    CorrectionReport,
    PreconditionError,
    correct_baseline,
    correct_fast,
    freivalds_verify,
    oracle_product,
)
from .counting import OpCounter

PATTERNS = ("uniform", "cross", "row-heavy", "scatter")
EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3
DEFAULT_ORACLE_CAP = 512


class MatrixFormatError(ValueError):
    pass


# -- matrix files -------------------------------------------------------------


def parse_matrix(source, bigint: bool = False) -> np.ndarray:
    """Read ``rows cols`` followed by ``rows`` lines of ``cols`` integers."""
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    if not lines:
        raise MatrixFormatError("empty input")
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise MatrixFormatError(f"malformed header {lines[0]!r}")
    rows, cols = int(header[0]), int(header[1])
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"dimensions must be positive, got {rows} x {cols}")
    body = [line for line in lines[1:] if line.strip()]
    if len(body) != rows:
        raise MatrixFormatError(f"expected {rows} rows, found {len(body)}")
    data = []
    for r, line in enumerate(body, start=2):
        tokens = line.split()
        if len(tokens) != cols:
            raise MatrixFormatError(f"line {r}: expected {cols} entries, found {len(tokens)}")
        try:
            values = [int(t, 10) for t in tokens]
        except ValueError:
            raise MatrixFormatError(f"line {r}: non-integer token in {line!r}") from None
        if not bigint and any(abs(v) > INT64_MAX for v in values):
            raise CapacityError(f"line {r}: entry magnitude exceeds int64")
        data.append(values)
    return as_matrix(data, bigint=bigint)


def write_matrix(M: np.ndarray) -> str:
    out = [f"{M.shape[0]} {M.shape[1]}"]
    out.extend(" ".join(str(int(v)) for v in row) for row in M)
    return "\n".join(out) + "\n"


def load_matrix(path, bigint: bool = False) -> np.ndarray:
    with open(path) as fh:
        return parse_matrix(fh, bigint=bigint)


def save_matrix(path, M: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(write_matrix(M))


# -- generation and injection -------------------------------------------------


def random_matrix(n: int, alpha: int, rng: np.random.Generator, bigint: bool = False):
    M = rng.integers(-alpha, alpha + 1, size=(n, n), dtype=np.int64)
    return M.astype(object) if bigint else M


def random_instance(n: int, alpha: int, seed: int, bigint: bool = False):
    """A, B with entries in [-alpha, alpha] and their exact product."""
    rng = np.random.default_rng(seed)
    A = random_matrix(n, alpha, rng, bigint)
    B = random_matrix(n, alpha, rng, bigint)
    return A, B, oracle_product(A, B)


@dataclass
class InjectionSpec:
    k: int
    pattern: str = "uniform"
    rng_seed: int = 0
    delta_range: tuple[int, int] = (-10, 10)
    custom: list[tuple[int, int, int]] | None = None


def _positions(n: int, spec: InjectionSpec, rng) -> list[tuple[int, int]]:
    k = spec.k
    if spec.pattern == "uniform":
        flat = rng.choice(n * n, size=k, replace=False)
        return [divmod(int(f), n) for f in flat]
    if spec.pattern == "cross":
        in_row, in_col = (k + 1) // 2, k // 2
        if in_row > n - 1 or in_col > n - 1:
            raise ValueError(f"cross pattern with k={k} does not fit n={n}")
        r, c = (int(v) for v in rng.integers(0, n, size=2))
        cols = rng.choice(np.delete(np.arange(n), c), size=in_row, replace=False)
        rows = rng.choice(np.delete(np.arange(n), r), size=in_col, replace=False)
        return [(r, int(j)) for j in cols] + [(int(i), c) for i in rows]
    if spec.pattern == "row-heavy":
        heavy = rng.choice(n, size=math.ceil(k / n), replace=False)
        cells = [(int(i), j) for i in heavy for j in range(n)]
        pick = rng.choice(len(cells), size=k, replace=False)
        return [cells[t] for t in pick]
    if spec.pattern == "scatter":
        if k > n:
            raise ValueError(f"scatter pattern needs k <= n, got k={k}, n={n}")
        rows = rng.choice(n, size=k, replace=False)
        cols = rng.choice(n, size=k, replace=False)
        return [(int(i), int(j)) for i, j in zip(rows, cols)]
    raise ValueError(f"unknown pattern {spec.pattern!r}; choose from {PATTERNS}")


def inject_errors(C: np.ndarray, spec: InjectionSpec):
    """Corrupt a copy of C at exactly k distinct positions by nonzero deltas.

    Returns the corrupted copy and the ground truth ``[(i, j, delta), ...]``.
    """
    n = C.shape[0]
    if spec.k < 0 or spec.k > n * n:
        raise ValueError(f"cannot inject {spec.k} errors into a {n} x {n} matrix")
    if spec.custom is not None:
        truth = [(int(i), int(j), int(d)) for i, j, d in spec.custom]
        if len({(i, j) for i, j, _ in truth}) != len(truth) or any(d == 0 for *_, d in truth):
            raise ValueError("custom errors need distinct positions and nonzero deltas")
    else:
        lo, hi = spec.delta_range
        deltas = [d for d in range(lo, hi + 1) if d]
        if not deltas:
            raise ValueError(f"delta range {spec.delta_range} has no nonzero value")
        rng = np.random.default_rng(spec.rng_seed)
        positions = _positions(n, spec, rng) if spec.k else []
        picks = rng.choice(len(deltas), size=len(positions))
        truth = [(i, j, deltas[t]) for (i, j), t in zip(positions, picks)]
    corrupted = C.copy()
    for i, j, d in truth:
        corrupted[i, j] += d
    return corrupted, truth


# -- runs ---------------------------------------------------------------------


@dataclass
class RunConfig:
    algorithm: str = "fast"  # baseline | fast | both
    k: int = 0
    verify: bool = False
    verify_trials: int = 30
    seed: int = 0
    a: str | None = None
    b: str | None = None
    c: str | None = None
    n: int | None = None
    alpha: int = 100
    errors: int | None = None  # injected count; defaults to k
    pattern: str = "uniform"
    delta_range: tuple[int, int] = (-10, 10)
    bigint: bool = False
    oracle_cap: int = DEFAULT_ORACLE_CAP
    output: str | None = None
    corrected_out: str | None = None


@dataclass
class RunResult:
    exit_code: int
    text: str
    reports: dict[str, CorrectionReport] = field(default_factory=dict)
    truth: list[tuple[int, int, int]] | None = None
    final: dict[str, np.ndarray] = field(default_factory=dict)


def oracle_cap(flag_value: int = DEFAULT_ORACLE_CAP) -> int:
    env = os.environ.get("MATCORRECT_ORACLE_CAP")
    return int(env) if env else flag_value


def load_inputs(config: RunConfig):
    """Return (A, B, C, truth) from files or from the generator."""
    if config.a or config.b or config.c:
        if not (config.a and config.b and config.c):
            raise ValueError("--a, --b and --c must be given together")
        A, B, C = (load_matrix(p, config.bigint) for p in (config.a, config.b, config.c))
        n = A.shape[0]
        if any(M.shape != (n, n) for M in (A, B, C)):
            raise ValueError(f"need square matrices of one size, got {A.shape}, {B.shape}, {C.shape}")
        return A, B, C, None
    if config.n is None:
        raise ValueError("give --a/--b/--c or a generator size --n")
    injected = config.k if config.errors is None else config.errors
    if injected > config.k:
        raise ValueError(f"injected errors ({injected}) exceed the declared bound k={config.k}")
    A, B, C = random_instance(config.n, config.alpha, config.seed, config.bigint)
    spec = InjectionSpec(injected, config.pattern, config.seed + 1, config.delta_range)
    C, truth = inject_errors(C, spec)
    return A, B, C, truth


def format_report(report: CorrectionReport, extra: dict) -> str:
    header = {
        "algorithm": report.algorithm,
        "n": report.n,
        "k": report.k,
        "certificate_width": report.m,
        "prime": report.p,
        "corrected": len(report.corrected_entries),
        "rows_recomputed": report.rows_recomputed,
        "cols_recomputed": report.cols_recomputed,
        "ops_mults": report.ops.mults,
        "ops_adds": report.ops.adds,
        "ops_total": report.ops.total,
    }
    header.update({f"ops_{name}": v for name, v in report.phase_ops.items()})
    header.update(
        {
            "peak_abs_value": report.ops.peak,
            "value_bound": report.value_bound,
            "verified": "none" if report.verified is None else str(report.verified).lower(),
        }
    )
    header.update(extra)
    out = io.StringIO()
    for key, value in header.items():
        out.write(f"{key}: {value}\n")
    out.write("entries:\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["row", "col", "old", "new", "phase"])
    for e in report.corrected_entries:
        writer.writerow([e.row, e.col, e.old, e.new, e.phase])
    return out.getvalue()


def run(config: RunConfig) -> RunResult:
    """Load or generate inputs, correct, check, and render the report."""
    if config.algorithm not in ("baseline", "fast", "both"):
        return RunResult(EXIT_INPUT, f"error: unknown algorithm {config.algorithm!r}\n")
    if config.k < 0:
        return RunResult(EXIT_INPUT, f"error: k must be >= 0, got {config.k}\n")
    try:
        A, B, C, truth = load_inputs(config)
        check_capacity(A, B, C)
    except CapacityError as exc:
        return RunResult(EXIT_CAPACITY, f"error: {exc}\n")
    except (OSError, ValueError) as exc:
        return RunResult(EXIT_INPUT, f"error: {exc}\n")

    n = A.shape[0]
    cap = oracle_cap(config.oracle_cap)
    expected = oracle_product(A, B) if n <= cap else None
    algorithms = ["baseline", "fast"] if config.algorithm == "both" else [config.algorithm]
    result = RunResult(EXIT_OK, "", truth=truth)
    sections = []
    for name in algorithms:
        work = C.copy()
        ops = OpCounter()
        start = time.perf_counter()
        failure = None
        try:
            if name == "baseline":
                report = correct_baseline(A, B, work, config.k, ops)
            else:
                report = correct_fast(A, B, work, config.k, ops)
        except PreconditionError as exc:
            report, failure = exc.report, str(exc)
        elapsed = time.perf_counter() - start
        if config.verify:
            report.verified = freivalds_verify(A, B, work, config.verify_trials, config.seed)
        if expected is None:
            oracle = "skipped"
        else:
            oracle = "match" if np.array_equal(work, expected) else "mismatch"
        status = "ok"
        if failure or oracle == "mismatch" or report.verified is False:
            status = "mismatch"
            result.exit_code = EXIT_MISMATCH
        extra = {"wall_time_s": f"{elapsed:.6f}", "oracle": oracle, "status": status}
        if truth is not None:
            extra["injected"] = len(truth)
        if failure:
            extra["failure"] = failure
        sections.append(format_report(report, extra))
        result.reports[name] = report
        result.final[name] = work

    if len(algorithms) == 2:
        same = np.array_equal(result.final["baseline"], result.final["fast"])
        sections.append(f"identical: {str(same).lower()}\n")
        if not same:
            result.exit_code = EXIT_MISMATCH
    result.text = "\n".join(sections)
    if config.output:
        with open(config.output, "w") as fh:
            fh.write(result.text)
    if config.corrected_out:
        save_matrix(config.corrected_out, result.final[algorithms[-1]])
    return result


# -- benchmarks ---------------------------------------------------------------

BENCH_FIELDS = ["n", "k", "pattern", "algorithm", "rep", "mults", "adds", "ops", "bound", "ratio", "wall_time_s"]


def complexity_bound(n: int, k: int) -> float:
    """sqrt(k) n^2 + k^2 n, the fast algorithm's operation envelope."""
    return math.sqrt(k) * n * n + k * k * n


def benchmark(
    ns,
    ks,
    repetitions: int = 1,
    seed: int = 0,
    pattern: str = "scatter",
    algorithms=("baseline", "fast"),
    alpha: int = 10,
    check: bool = True,
) -> list[dict]:
    """One row per (n, k, repetition, algorithm) with exact operation counts."""
    ns, ks = list(ns), list(ks)
    if not ns or not ks:
        raise ValueError("benchmark grid is empty")
    rows = []
    for n in ns:
        for k in ks:
            for rep in range(repetitions):
                instance_seed = seed + 1000 * rep
                A, B, P = random_instance(n, alpha, instance_seed)
                C, _ = inject_errors(P, InjectionSpec(k, pattern, instance_seed + 1))
                check_capacity(A, B, C)
                for name in algorithms:
                    work = C.copy()
                    ops = OpCounter()
                    start = time.perf_counter()
                    (correct_baseline if name == "baseline" else correct_fast)(A, B, work, k, ops)
                    elapsed = time.perf_counter() - start
                    if check and not np.array_equal(work, P):
                        raise AssertionError(f"{name} failed to correct n={n} k={k} rep={rep}")
                    bound = complexity_bound(n, k)
                    rows.append(
                        {
                            "n": n,
                            "k": k,
                            "pattern": pattern,
                            "algorithm": name,
                            "rep": rep,
                            "mults": ops.mults,
                            "adds": ops.adds,
                            "ops": ops.total,
                            "bound": bound,
                            "ratio": ops.total / bound if bound else float("nan"),
                            "wall_time_s": elapsed,
                        }
                    )
    return rows


def format_bench(rows: list[dict]) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "ratio": f"{row['ratio']:.6f}", "wall_time_s": f"{row['wall_time_s']:.6f}"})
    return out.getvalue()
