"""Scaling benchmarks: kernel builders and prediction.

Everything here reports orderings, ratios and log-log slopes — never
absolute expectations — because wall-clock values are hardware-bound.
Timing protocol: one discarded warm-up call, then the median of >= 5
repetitions, each repetition averaging enough inner iterations to clear a
minimum measurable duration.  Tree generation is deterministic per seed so
re-runs cover identical inputs.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .kernel import KernelParams, subpath_kernel
from .predict import SupportSet, build_master_index, predict, predict_direct
from .trees import random_tree


@dataclass(frozen=True)
class BenchPoint:
    """One timed configuration: problem size, per-call medians and raw runs."""

    size: int
    seconds: float
    runs: list[float]
    inner_iters: int


@dataclass
class BenchReport:
    """Series of timing points plus derived slopes and ratios."""

    name: str
    config: dict
    series: dict[str, list[BenchPoint]] = field(default_factory=dict)
    slopes: dict[str, float] = field(default_factory=dict)
    ratios: dict[str, float] = field(default_factory=dict)

    def sizes(self, series: str) -> list[int]:
        return [p.size for p in self.series[series]]

    def times(self, series: str) -> list[float]:
        return [p.seconds for p in self.series[series]]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def measure(fn, *, reps: int = 5, min_time: float = 0.01) -> tuple[float, list[float], int]:
    """Median per-call seconds over ``reps`` runs, after a discarded warm-up.

    Each run loops ``fn`` enough times that its duration exceeds
    ``min_time``, then divides; returns (median, runs, inner iterations).
    """
    fn()
    iters = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(iters):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_time:
            break
        iters *= 2
    runs = [dt / iters]
    for _ in range(reps - 1):
        t0 = time.perf_counter()
        for _ in range(iters):
            fn()
        runs.append((time.perf_counter() - t0) / iters)
    return float(np.median(runs)), runs, iters


def loglog_slope(sizes, times) -> float:
    """Least-squares slope of log(time) against log(size)."""
    xs = np.log(np.asarray(sizes, float))
    ys = np.log(np.asarray(times, float))
    return float(np.polyfit(xs, ys, 1)[0])


def bench_kernel(
    sizes: list[int] | None = None,
    *,
    sigma: int = 5,
    lam: float = 0.5,
    seed: int = 7,
    reps: int = 5,
) -> BenchReport:
    """Time random-pair kernels with the linear and the reference builder."""
    if sizes is None:
        sizes = [1 << k for k in range(12, 18)]
    params = KernelParams(lam=lam)
    report = BenchReport(
        name="kernel-builders",
        config={"sizes": sizes, "sigma": sigma, "lam": lam, "seed": seed, "reps": reps},
        series={"linear": [], "reference": []},
    )
    for i, n in enumerate(sizes):
        t1 = random_tree(n, sigma, seed + 2 * i)
        t2 = random_tree(n, sigma, seed + 2 * i + 1)
        for builder in ("linear", "reference"):
            med, runs, iters = measure(
                lambda: subpath_kernel(t1, t2, params, builder=builder), reps=reps
            )
            report.series[builder].append(
                BenchPoint(size=n, seconds=med, runs=runs, inner_iters=iters)
            )
    for builder in ("linear", "reference"):
        report.slopes[builder] = loglog_slope(report.sizes(builder), report.times(builder))
    report.ratios["linear_over_reference_at_max"] = (
        report.series["linear"][-1].seconds / report.series["reference"][-1].seconds
    )
    return report


def _support_set(m: int, sv_n: int, sigma: int, lam: float, seed: int) -> SupportSet:
    trees = [random_tree(sv_n, sigma, seed + k) for k in range(m)]
    return SupportSet(trees=trees, alphas=[1.0] * m, bias=0.0, params=KernelParams(lam=lam))


def bench_predict(
    m_values: list[int] | None = None,
    input_sizes: list[int] | None = None,
    *,
    sv_n: int = 30,
    input_n: int = 200,
    m_fixed: int = 100,
    sigma: int = 5,
    lam: float = 0.5,
    seed: int = 11,
    reps: int = 5,
) -> BenchReport:
    """Prediction cost against support count m and against input size.

    Series: ``predict_vs_m`` and ``direct_vs_m`` at a fixed input tree, and
    ``predict_vs_n`` at fixed m.  Derived figures: max/min ratio of predict
    across m (flatness), slope of direct against m, slope of predict
    against input size.  The direct path uses the reference builder: faster
    at these per-pair sizes, and the m-scaling is builder-independent.
    """
    if m_values is None:
        m_values = list(range(100, 1001, 100))
    if input_sizes is None:
        input_sizes = [1 << k for k in range(10, 15)]
    report = BenchReport(
        name="prediction",
        config={
            "m_values": m_values,
            "input_sizes": input_sizes,
            "sv_n": sv_n,
            "input_n": input_n,
            "m_fixed": m_fixed,
            "sigma": sigma,
            "lam": lam,
            "seed": seed,
            "reps": reps,
        },
        series={"predict_vs_m": [], "direct_vs_m": [], "predict_vs_n": []},
    )
    fixed_input = random_tree(input_n, sigma, seed - 1)
    biggest = _support_set(max(m_values), sv_n, sigma, lam, seed)
    for m in m_values:
        sv = SupportSet(
            trees=biggest.trees[:m],
            alphas=biggest.alphas[:m],
            bias=0.0,
            params=biggest.params,
        )
        idx = build_master_index(sv)
        med, runs, iters = measure(lambda: predict(idx, fixed_input), reps=reps)
        report.series["predict_vs_m"].append(
            BenchPoint(size=m, seconds=med, runs=runs, inner_iters=iters)
        )
        med, runs, iters = measure(
            lambda: predict_direct(sv, fixed_input, builder="reference"), reps=reps
        )
        report.series["direct_vs_m"].append(
            BenchPoint(size=m, seconds=med, runs=runs, inner_iters=iters)
        )
    sv = SupportSet(
        trees=biggest.trees[:m_fixed],
        alphas=biggest.alphas[:m_fixed],
        bias=0.0,
        params=biggest.params,
    )
    idx = build_master_index(sv)
    for k, n in enumerate(input_sizes):
        t = random_tree(n, sigma, seed + 10_000 + k)
        med, runs, iters = measure(lambda: predict(idx, t), reps=reps)
        report.series["predict_vs_n"].append(
            BenchPoint(size=n, seconds=med, runs=runs, inner_iters=iters)
        )
    times_m = report.times("predict_vs_m")
    report.ratios["predict_flatness_vs_m"] = max(times_m) / min(times_m)
    report.slopes["direct_vs_m"] = loglog_slope(report.sizes("direct_vs_m"), report.times("direct_vs_m"))
    report.slopes["predict_vs_n"] = loglog_slope(report.sizes("predict_vs_n"), report.times("predict_vs_n"))
    return report
