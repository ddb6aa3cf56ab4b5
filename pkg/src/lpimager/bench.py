"""Worker-count sweeps with speedups and a fitted cost model."""
from __future__ import annotations

import os
import platform
import statistics

from .costmodel import TimingSample, fit_params
from .field import BasisSet, FieldSpec, field_size
from .image import build_image_sequential
from .model import LpProblem, ObjectiveFrame
from .parallel import DEFAULT_BACKEND, build_image_parallel
from .projection import ProjectionContext


def available_cores() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def run_bench(
    p: LpProblem,
    frame: ObjectiveFrame,
    spec: FieldSpec,
    basis: BasisSet,
    workers_list=(1, 2, 4, 8),
    strategy: str = "point-split",
    backend: str | None = None,
    repeats: int = 1,
    fit: bool = True,
) -> dict:
    """Time image builds for each worker count and return a JSON-ready report.

    Speedups are relative to the ``workers=1`` run of the same strategy.  When
    ``fit`` is set, per-iteration timings from constraint-split builds at the
    same worker counts are fitted to the cost model.
    """
    workers_list = sorted(set(int(w) for w in workers_list) | {1})
    backend = backend or DEFAULT_BACKEND[strategy]
    ctx = ProjectionContext(p, frame)
    reference = build_image_sequential(p, frame, spec, basis, ctx=ctx).values_bytes()

    runs, identical = [], True
    for w in workers_list:
        times = []
        for _ in range(repeats):
            img = build_image_parallel(p, frame, spec, basis, w, strategy, backend, ctx=ctx)
            identical &= img.values_bytes() == reference
            times.append(img.wall_time)
        runs.append({"workers": w, "wall_time": statistics.median(times)})
    base = runs[0]["wall_time"]
    for run in runs:
        run["speedup"] = base / run["wall_time"]

    report = {
        "problem_sha256": p.fingerprint(),
        "n": p.n,
        "m": p.m,
        "eta": spec.eta,
        "delta": spec.delta,
        "field_size": field_size(spec),
        "strategy": strategy,
        "backend": backend,
        "cores": available_cores(),
        "python": platform.python_version(),
        "runs": runs,
        "identical_images": bool(identical),
        "fit": None,
        "predicted_L_max": None,
    }
    if fit and len(workers_list) >= 3:
        samples = []
        for w in workers_list:
            img = build_image_parallel(p, frame, spec, basis, w, "constraint-split", "thread", ctx=ctx)
            samples.extend(TimingSample(w, t) for t in img.iteration_times)
        result = fit_params(samples, p.m)
        report["fit"] = {
            "t_c": result.t_c,
            "t_map": result.t_map,
            "t_a": result.t_a,
            "residuals": {str(k): v for k, v in result.residuals.items()},
            "rel_rms": result.rel_rms,
            "warnings": result.warnings,
        }
        report["predicted_L_max"] = result.bound()
    return report
