"""Monte Carlo sampling of the chain with interchangeable update kernels.

Both kernels consume exactly one uniform per site per step (the draw is
discarded at forced sites), in site order, so a scalar and a bit-parallel run
with the same seed produce bit-identical trajectories. The bit-parallel
kernel packs each step's n threshold comparisons into machine integers with
np.packbits and updates all sites with a handful of word operations.

Per-chain streams come from numpy's SeedSequence.spawn, so results are
reproducible for a fixed (seed, chains, kernel-independent) plan and chains
never share a stream. All accumulators are integers until the final division,
which makes merged results independent of chain scheduling order. The one
field outside the determinism guarantee is steps_per_second.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, DomainError, ParamError
from .model import ConfigLike, Configuration, ModelParams, count_patterns, scalar_step, window_masks
from .solver import StationaryTable

__all__ = [
    "HISTOGRAM_AUTO_LIMIT",
    "HISTOGRAM_CAP",
    "TRACE_CAP",
    "SimulationPlan",
    "EmpiricalSummary",
    "bitparallel_step",
    "run",
    "tv_distance",
    "kernel_throughput",
]

HISTOGRAM_AUTO_LIMIT = 65_536  # state count above which histograms default off
HISTOGRAM_CAP = 1 << 20  # hard ceiling even when explicitly requested
TRACE_CAP = 100_000  # max trace lines written per run
_NUM_BATCHES = 32  # batches per chain for the batch-means error bar
_CHUNK = 4096  # steps of uniforms drawn per packbits call

_KERNELS = ("bitparallel", "scalar")


@dataclass(frozen=True)
class SimulationPlan:
    """Frozen description of one sampling run.

    samples counts retained configurations per chain; the run visits
    burn_in + samples * thin steps in each chain. start accepts a
    configuration (Configuration, int code, or site-1-leftmost string) or the
    shorthands "zeros" / "ones". histogram=None enables state counting
    automatically for state spaces up to HISTOGRAM_AUTO_LIMIT. threads=None
    reads NEDPCA_THREADS from the environment, defaulting to 1.
    """

    params: ModelParams
    seed: int
    samples: int
    chains: int = 1
    burn_in: int = 10_000
    thin: int = 1
    start: Union[ConfigLike, str] = 0
    kernel: str = "bitparallel"
    histogram: Optional[bool] = None
    trace_path: Optional[str] = None
    threads: Optional[int] = None

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ParamError(f"seed must be a nonnegative int, got {self.seed!r}")
        if not isinstance(self.samples, int) or self.samples < 0:
            raise ParamError(f"samples must be a nonnegative int, got {self.samples!r}")
        for name in ("chains", "thin"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ParamError(f"{name} must be a positive int, got {v!r}")
        if not isinstance(self.burn_in, int) or self.burn_in < 0:
            raise ParamError(f"burn_in must be a nonnegative int, got {self.burn_in!r}")
        if self.kernel not in _KERNELS:
            raise ParamError(f"kernel must be one of {_KERNELS}, got {self.kernel!r}")
        if self.histogram and self.params.n_states > HISTOGRAM_CAP:
            raise BudgetExceeded(
                f"histogram over {self.params.n_states} states exceeds cap {HISTOGRAM_CAP}"
            )
        if self.threads is not None and (not isinstance(self.threads, int) or self.threads < 1):
            raise ParamError(f"threads must be a positive int, got {self.threads!r}")
        self.start_code  # validate eagerly

    @property
    def start_code(self) -> int:
        if self.start == "zeros":
            return 0
        if self.start == "ones":
            return self.params.n_states - 1
        return Configuration.coerce(self.start, self.params.n).code

    @property
    def histogram_enabled(self) -> bool:
        if self.histogram is None:
            return self.params.n_states <= HISTOGRAM_AUTO_LIMIT
        return self.histogram

    @property
    def resolved_threads(self) -> int:
        if self.threads is not None:
            return self.threads
        env = os.environ.get("NEDPCA_THREADS", "")
        return int(env) if env.isdigit() and int(env) >= 1 else 1


@dataclass(frozen=True)
class EmpiricalSummary:
    """Merged estimates from all chains of one run.

    Means are per site: density_mean estimates P[site occupied]; the
    pattern_means entries give the expected per-site rate of occupied sites
    ("n1"), of each inner pattern 1 0^r 1 for r = 1..m-2 ("n10r1", tuple),
    and of full-gap windows 0^(m-1) 1 ("n0m1"). histogram holds raw visit
    counts indexed by configuration code, or None when disabled. stderr is a
    batch-means estimate (NaN when fewer than two batches contribute).
    """

    plan: SimulationPlan
    total_samples: int
    density_mean: float
    density_stderr: float
    pattern_means: dict
    histogram: Optional[tuple]
    steps_per_second: float

    @property
    def is_empty(self) -> bool:
        return self.total_samples == 0

    def to_json_dict(self) -> dict:
        p = self.plan.params

        def safe(x: float):
            return None if isinstance(x, float) and not math.isfinite(x) else x

        return {
            "n": p.n,
            "m": p.m,
            "p1": float(p.p1),
            "p2": float(p.p2),
            "seed": self.plan.seed,
            "chains": self.plan.chains,
            "kernel": self.plan.kernel,
            "samples": self.total_samples,
            "density_mean": safe(self.density_mean),
            "density_stderr": safe(self.density_stderr),
            "pattern_means": {
                "n1": safe(self.pattern_means["n1"]),
                "n10r1": [safe(x) for x in self.pattern_means["n10r1"]],
                "n0m1": safe(self.pattern_means["n0m1"]),
            },
            "histogram": None if self.histogram is None else list(self.histogram),
            "steps_per_second": safe(self.steps_per_second),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _pack_thresholds(u: np.ndarray, p1: float, r2: float) -> tuple[bytes, bytes]:
    # row t of u holds step t's uniforms; bit i of the packed row answers u[t,i] < threshold
    d1 = np.packbits(u < p1, axis=1, bitorder="little").tobytes()
    d2 = np.packbits(u < r2, axis=1, bitorder="little").tobytes()
    return d1, d2


def bitparallel_step(code: int, params: ModelParams, u: Sequence[float]) -> int:
    """One synchronous update using word-level operations; u has one uniform per site."""
    arr = np.asarray(u, dtype=float).reshape(1, params.n)
    d1, d2 = _pack_thresholds(arr, float(params.p1), 1.0 - float(params.p2))
    open_mask, blocked_mask = window_masks(code, params)
    draw1 = int.from_bytes(d1, "little")
    draw2 = int.from_bytes(d2, "little")
    return (open_mask & draw1) | (blocked_mask & draw2)


@dataclass
class _ChainResult:
    batch_ones: list
    batch_sizes: list
    histogram: Optional[np.ndarray]
    pattern_totals: Optional[tuple]  # (n1, tuple(n10r1), n0m1) when histogram is off
    trace: Optional[list]
    steps: int = 0


def _run_chain(plan: SimulationPlan, chain_index: int, child_seed) -> _ChainResult:
    params = plan.params
    n = params.n
    p1, r2 = float(params.p1), 1.0 - float(params.p2)
    rng = np.random.Generator(np.random.Philox(child_seed))
    scalar = plan.kernel == "scalar"
    row_bytes = (n + 7) // 8

    code = plan.start_code
    hist = np.zeros(params.n_states, dtype=np.int64) if plan.histogram_enabled else None
    batch_ones = [0] * _NUM_BATCHES
    batch_sizes = [0] * _NUM_BATCHES
    pat1 = 0
    pat_inner = [0] * (params.m - 2)
    pat_blocked = 0
    count_directly = hist is None and plan.samples > 0
    trace = [] if plan.trace_path and chain_index == 0 else None

    total_steps = plan.burn_in + plan.samples * plan.thin
    done = 0
    retained = 0
    codes = [] if hist is not None else None
    while done < total_steps:
        chunk = min(_CHUNK, total_steps - done)
        u = rng.random((chunk, n))
        if scalar:
            rows = u
        else:
            d1, d2 = _pack_thresholds(u, p1, r2)
        for t in range(chunk):
            if scalar:
                code = scalar_step(code, params, rows[t])
            else:
                open_mask, blocked_mask = window_masks(code, params)
                lo, hi = t * row_bytes, (t + 1) * row_bytes
                code = (open_mask & int.from_bytes(d1[lo:hi], "little")) | (
                    blocked_mask & int.from_bytes(d2[lo:hi], "little")
                )
            step = done + t
            if step < plan.burn_in or (step - plan.burn_in) % plan.thin != plan.thin - 1:
                continue
            b = retained * _NUM_BATCHES // plan.samples
            batch_ones[b] += code.bit_count()
            batch_sizes[b] += 1
            retained += 1
            if codes is not None:
                codes.append(code)
            if count_directly:
                pc = count_patterns(code, params)
                pat1 += pc.n1
                for r, c in enumerate(pc.n10r1):
                    pat_inner[r] += c
                pat_blocked += pc.n0m1
            if trace is not None and len(trace) < TRACE_CAP:
                trace.append(Configuration(code, n).to_string())
        done += chunk
    if codes is not None and codes:
        np.add.at(hist, np.asarray(codes, dtype=np.int64), 1)
    totals = None if not count_directly else (pat1, tuple(pat_inner), pat_blocked)
    return _ChainResult(batch_ones, batch_sizes, hist, totals, trace, total_steps)


def run(plan: SimulationPlan) -> EmpiricalSummary:
    """Execute the plan and return merged estimates."""
    params = plan.params
    n = params.n
    children = np.random.SeedSequence(plan.seed).spawn(plan.chains)
    t0 = time.perf_counter()
    if plan.resolved_threads > 1 and plan.chains > 1:
        with ThreadPoolExecutor(max_workers=plan.resolved_threads) as pool:
            futures = [pool.submit(_run_chain, plan, i, c) for i, c in enumerate(children)]
            results = [f.result() for f in futures]
    else:
        results = [_run_chain(plan, i, c) for i, c in enumerate(children)]
    elapsed = time.perf_counter() - t0

    total_samples = plan.samples * plan.chains
    total_steps = sum(r.steps for r in results)
    steps_per_second = total_steps / elapsed if elapsed > 0 else float("inf")

    hist = None
    if plan.histogram_enabled:
        hist = np.zeros(params.n_states, dtype=np.int64)
        for r in results:
            hist += r.histogram

    all_means = []
    total_ones = 0
    for r in results:
        total_ones += sum(r.batch_ones)
        for ones, size in zip(r.batch_ones, r.batch_sizes):
            if size > 0:
                all_means.append(ones / (size * n))
    if total_samples > 0:
        density_mean = total_ones / (total_samples * n)
    else:
        density_mean = float("nan")
    if len(all_means) >= 2:
        arr = np.asarray(all_means)
        density_stderr = float(arr.std(ddof=1) / math.sqrt(len(arr)))
    else:
        density_stderr = float("nan")

    nan = float("nan")
    pattern_means = {"n1": nan, "n10r1": tuple([nan] * (params.m - 2)), "n0m1": nan}
    if total_samples > 0:
        if hist is not None:
            pat1 = 0
            pat_inner = [0] * (params.m - 2)
            pat_blocked = 0
            for code in np.flatnonzero(hist):
                c = int(hist[code])
                pc = count_patterns(int(code), params)
                pat1 += c * pc.n1
                for r, cnt in enumerate(pc.n10r1):
                    pat_inner[r] += c * cnt
                pat_blocked += c * pc.n0m1
        else:
            pat1 = sum(r.pattern_totals[0] for r in results)
            pat_inner = [
                sum(r.pattern_totals[1][i] for r in results) for i in range(params.m - 2)
            ]
            pat_blocked = sum(r.pattern_totals[2] for r in results)
        denom = total_samples * n
        pattern_means = {
            "n1": pat1 / denom,
            "n10r1": tuple(x / denom for x in pat_inner),
            "n0m1": pat_blocked / denom,
        }

    if plan.trace_path is not None and results[0].trace is not None:
        with open(plan.trace_path, "w") as fh:
            fh.write("\n".join(results[0].trace))
            if results[0].trace:
                fh.write("\n")

    return EmpiricalSummary(
        plan=plan,
        total_samples=total_samples,
        density_mean=density_mean,
        density_stderr=density_stderr,
        pattern_means=pattern_means,
        histogram=None if hist is None else tuple(int(x) for x in hist),
        steps_per_second=steps_per_second,
    )


def tv_distance(summary: EmpiricalSummary, table: StationaryTable) -> float:
    """Total variation distance between the empirical histogram and a stationary table."""
    if summary.histogram is None:
        raise DomainError("summary carries no histogram; rerun with histogram=True")
    if summary.is_empty:
        raise DomainError("empty summary has no empirical distribution")
    if len(summary.histogram) != len(table.probs):
        raise DimensionMismatch(
            f"histogram over {len(summary.histogram)} states vs table over {len(table.probs)}"
        )
    sp, tp = summary.plan.params, table.params
    if (sp.n, sp.m) != (tp.n, tp.m) or float(sp.p1) != float(tp.p1) or float(sp.p2) != float(tp.p2):
        raise DomainError(f"parameter mismatch: summary {sp} vs table {tp}")
    total = summary.total_samples
    return 0.5 * math.fsum(
        abs(c / total - float(p)) for c, p in zip(summary.histogram, table.probs)
    )


def kernel_throughput(
    params: ModelParams, kernel: str, steps: int, seed: int = 0
) -> float:
    """Steps per second of a bare sampling loop with no accumulation."""
    if kernel not in _KERNELS:
        raise ParamError(f"kernel must be one of {_KERNELS}, got {kernel!r}")
    if steps < 1:
        raise ParamError(f"need steps >= 1, got {steps}")
    n = params.n
    p1, r2 = float(params.p1), 1.0 - float(params.p2)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    row_bytes = (n + 7) // 8
    code = 0
    done = 0
    t0 = time.perf_counter()
    while done < steps:
        chunk = min(_CHUNK, steps - done)
        u = rng.random((chunk, n))
        if kernel == "scalar":
            for t in range(chunk):
                code = scalar_step(code, params, u[t])
        else:
            d1, d2 = _pack_thresholds(u, p1, r2)
            for t in range(chunk):
                open_mask, blocked_mask = window_masks(code, params)
                lo, hi = t * row_bytes, (t + 1) * row_bytes
                code = (open_mask & int.from_bytes(d1[lo:hi], "little")) | (
                    blocked_mask & int.from_bytes(d2[lo:hi], "little")
                )
        done += chunk
    elapsed = time.perf_counter() - t0
    return steps / elapsed if elapsed > 0 else float("inf")
