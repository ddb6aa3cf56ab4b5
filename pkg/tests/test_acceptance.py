"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a ``PASS``/``FAIL`` line; the lines are printed as they
happen (visible with ``-s``) and repeated in the terminal summary.  Run the
module directly (``python tests/test_acceptance.py``) for the lines alone.
"""
import math
import time

import numpy as np
import pytest

from lpimager import (
    CostParams,
    FieldSpec,
    LpProblem,
    ObjectiveFrame,
    ProjectionContext,
    build_basis,
    build_frame,
    build_image_parallel,
    build_image_sequential,
    check_field_axioms,
    count_Fk,
    count_G,
    count_Map,
    enumerate_field,
    field_size,
    generate,
    membership,
    receptive_point,
    reduce_naive,
    scalability_bound,
    scalability_bound_analytic,
    sigma_interval,
    validate_problem,
)
from lpimager.bench import available_cores, run_bench
from lpimager.generator import GeneratorParams, dumps_problem

RESULTS: dict[str, tuple[bool, str]] = {}


def record(name: str, ok: bool, detail: str) -> None:
    RESULTS[name] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail


def bits(x) -> bytes:
    return np.ascontiguousarray(x, dtype="<f8").tobytes()


def test_c01_field_cardinality():
    t0 = time.perf_counter()
    got = []
    for n in (5, 6, 7):
        spec = FieldSpec(np.zeros(n), 2, 1.0)
        got.append((field_size(spec), len(enumerate_field(spec, build_basis(np.ones(n))))))
    elapsed = time.perf_counter() - t0
    ok = got == [(625, 625), (3125, 3125), (15625, 15625)] and elapsed < 1.0
    record("1 field cardinality", ok, f"sizes {got}, {elapsed:.3f} s (< 1 s)")


def test_c02_ordinal_vs_enumeration():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    mismatches = cases = 0
    for n in range(2, 7):
        for eta in (1, 2):
            for _ in range(10):
                c = rng.normal(size=n)
                c[rng.random(n) < 0.25] = 0.0
                if not c.any():
                    c[-1] = 1.0
                spec = FieldSpec(rng.normal(size=n) * 50, eta, float(rng.uniform(1e-3, 10)))
                basis = build_basis(c)
                pts = enumerate_field(spec, basis)
                mismatches += sum(bits(receptive_point(k, spec, basis)) != bits(pts[k]) for k in range(len(pts)))
                cases += 1
    elapsed = time.perf_counter() - t0
    record("2 ordinal/enumeration", mismatches == 0 and elapsed < 30, f"{cases} cases, {mismatches} bitwise mismatches, {elapsed:.1f} s (< 30 s)")


def test_c03_projection_oracle():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst, miss_disagree, hits, points, kernel_diff = 0.0, 0, 0, 0, 0
    for inst in range(1000):
        n = int(rng.integers(2, 8))
        m_extra = int(rng.integers(0, 60 - 2 * n + 1))
        bundle = generate(n, m_extra, seed=inst)
        p = bundle.problem
        frame = build_frame(p, bundle.box, float(rng.uniform(0.5, 5.0)), anchor=bundle.interior_point)
        spec = FieldSpec(frame.z, 2 if n <= 5 else 1, float(rng.uniform(1.0, 40.0)))
        basis = build_basis(p.c)
        ctx = ProjectionContext(p, frame)
        for k in rng.choice(field_size(spec), size=20, replace=field_size(spec) < 20):
            g = receptive_point(int(k), spec, basis)
            got = reduce_naive(p, frame, g)
            kernel_diff += bits(got) != bits(ctx.reduce_range(g)[0])
            want = sigma_interval(p, g, p.c).sigma_m() * frame.c_norm
            points += 1
            if math.isinf(want) or math.isinf(got):
                miss_disagree += math.isinf(want) != math.isinf(got)
            else:
                hits += 1
                worst = max(worst, abs(got - want) / (1.0 + abs(want)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and miss_disagree == 0 and kernel_diff == 0 and elapsed < 120 and 0 < hits < points
    record(
        "3 projection oracle",
        ok,
        f"{points} points ({hits} hits), max rel err {worst:.2e} (<= 1e-9), {miss_disagree} MISS disagreements, "
        f"{kernel_diff} kernel mismatches, {elapsed:.1f} s (< 120 s)",
    )


def test_c04_golden_image():
    p = LpProblem([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], [1.0, 0.0, 1.0, 0.0], [0.0, 1.0])
    frame = ObjectiveFrame(p.c, [0.0, 2.0])
    img = build_image_sequential(p, frame, FieldSpec(frame.z, 1, 0.5), build_basis(p.c))
    v = img.values
    ok = v.size == 3 and math.isinf(v[0]) and abs(v[1] - 1.0) <= 1e-12 and abs(v[2] - 1.0) <= 1e-12
    record("4 golden image", ok, f"values {v.tolist()} (expected [inf, 1.0, 1.0])")


@pytest.fixture(scope="module")
def lp5():
    bundle = generate(5, 4002, seed=1)
    p = bundle.problem
    frame = build_frame(p, bundle.box, 1.0, anchor=bundle.interior_point)
    return p, frame, FieldSpec(frame.z, 2, 0.1), build_basis(p.c)


def test_c05_parallel_determinism(lp5):
    p, frame, spec, basis = lp5
    t0 = time.perf_counter()
    seq = build_image_sequential(p, frame, spec, basis).values_bytes()
    differing = []
    for strategy in ("point-split", "constraint-split"):
        for w in (1, 2, 4, 8):
            if build_image_parallel(p, frame, spec, basis, w, strategy).values_bytes() != seq:
                differing.append((strategy, w))
    elapsed = time.perf_counter() - t0
    hits = int(np.isfinite(np.frombuffer(seq, "<f8")).sum())
    ok = not differing and elapsed < 300 and p.m == 4012 and field_size(spec) == 625
    record("5 parallel determinism", ok, f"m={p.m}, K_G={field_size(spec)} ({hits} hits), 8 builds, differing {differing}, {elapsed:.1f} s (< 300 s)")


def test_c06_field_axioms():
    rng = np.random.default_rng(6)
    failed = []
    for n in range(2, 7):
        for eta in (1, 2):
            spec = FieldSpec(rng.normal(size=n) * 10, eta, float(rng.uniform(0.1, 3)))
            report = check_field_axioms(enumerate_field(spec, build_basis(rng.normal(size=n))), spec, samples=10_000, rng=rng)
            failed += [(n, eta, name) for name in report.checked if not report.passed(name)]
    record("6 field axioms", not failed, f"n=2..6, eta=1,2, 10000 hull samples; failed conditions {failed}")


def test_c07_cost_identities():
    ns = range(2, 101)
    ms = sorted({1, 2, 3, 10_000} | {int(v) for v in np.geomspace(1, 10_000, 60)})
    bad = [(n, m) for n in ns for m in ms if count_Map(n, m) != m * (count_G(n) + count_Fk(n, m))]

    limits = []
    t_map, t_a, m = 8.0e-2, 3.0e-9, 4012
    want = 0.5 * math.sqrt(t_map / t_a + 4 * m)
    limits.append(("t_c -> 0", abs(scalability_bound(CostParams(1e-300, t_map, t_a, m)) - want) / want))
    huge = scalability_bound(CostParams(1e15, 1.0, 1.0, 1))
    limits.append(("t_c huge -> 0+", 0.0 if 0.0 < huge <= 1e-12 else 1.0))
    for n, mm in ((2, 1), (5, 4012), (7, 4016), (100, 10_000)):
        want = 0.5 * math.sqrt(4 * n * n * mm + 2 * mm * mm * n + 16 * n * mm - 12 * mm + 4 * mm)
        limits.append((f"tau_tr=D=0 n={n} m={mm}", abs(scalability_bound_analytic(n, mm, 1e-9, 0.0, 0.0) - want) / want))
    worst = max(err for _, err in limits)
    ok = not bad and worst <= 1e-12
    record("7 cost identities", ok, f"{len(ns) * len(ms)} (n, m) pairs, {len(bad)} identity failures; bound limits max rel err {worst:.1e} (<= 1e-12)")


def test_c08a_desk_speedup():
    bundle = generate(5, 990, seed=8)
    p = bundle.problem
    frame = build_frame(p, bundle.box, 1.0, anchor=bundle.interior_point)
    spec = FieldSpec(frame.z, 4, 0.1)
    report = run_bench(p, frame, spec, build_basis(p.c), (1, 2, 4, 8), "point-split", fit=False)
    at8 = next(r for r in report["runs"] if r["workers"] == 8)["speedup"]
    speedups = {r["workers"]: round(r["speedup"], 2) for r in report["runs"]}
    ok = at8 >= 3.0 and report["identical_images"]
    record("8a desk speedup", ok, f"m={p.m}, K_G={field_size(spec)}, cores={available_cores()}, speedups {speedups} (need >= 3.0 at 8)")


def test_c08b_table_ordering():
    tau = dict(tau_op=1e-9, tau_tr=1e-9, D=1e-8)
    bounds = [scalability_bound_analytic(n, m, **tau) for n, m in ((5, 4012), (6, 4014), (7, 4016))]
    ok = bounds[0] < bounds[1] < bounds[2]
    record("8b bound ordering n=5,6,7", ok, f"L_max {[round(b, 1) for b in bounds]} with tau_op=1e-9, tau_tr=1e-9, D=1e-8")


def test_c08c_asymptotic_slope():
    tau = dict(tau_op=1e-9, tau_tr=1e-9, D=1e-8)
    ns = [2**k for k in range(4, 11)]
    logs = np.log([scalability_bound_analytic(n, n, **tau) for n in ns])
    local = np.diff(logs) / np.diff(np.log(ns))
    overall = float(np.polyfit(np.log(ns), logs, 1)[0])
    gaps = np.abs(local - 1.5)
    ok = abs(local[-1] - 1.5) <= 0.05 and abs(overall - 1.5) <= 0.05 and gaps[-1] < gaps[0]
    record("8c slope -> 1.5", ok, f"local slopes {np.round(local, 4).tolist()}, fitted slope {overall:.4f} (1.5 +- 0.05)")


def test_c09_generator_guarantees():
    rng = np.random.default_rng(9)
    params = GeneratorParams()
    problems = []
    for seed in range(500):
        n, m_extra = int(rng.integers(2, 8)), int(rng.integers(0, 80))
        bundle = generate(n, m_extra, seed, params)
        p = bundle.problem
        slack = p.b - p.A @ bundle.interior_point
        if not validate_problem(p).ok:
            problems.append((seed, "validate"))
        if not (membership(p, bundle.interior_point) and slack.min() >= params.slack_margin * (1 - 1e-12)):
            problems.append((seed, "interior"))
        if dumps_problem(bundle) != dumps_problem(generate(n, m_extra, seed, params)):
            problems.append((seed, "regeneration"))
    record("9 generator guarantees", not problems, f"500 seeds, failures {problems[:5]}")


def test_c10_monotone_coverage():
    rng = np.random.default_rng(10)
    violations, finite_seen = [], 0
    for trial in range(100):
        n = int(rng.integers(2, 6))
        bundle = generate(n, int(rng.integers(1, 30)), seed=1000 + trial)
        p = bundle.problem
        frame = build_frame(p, bundle.box, 1.0, anchor=bundle.interior_point)
        spec = FieldSpec(frame.z, 2, float(rng.uniform(2.0, 25.0)))
        basis = build_basis(p.c)
        before = build_image_sequential(p, frame, spec, basis).values
        drop = int(rng.integers(2 * n, p.m))
        after = build_image_sequential(p.without_row(drop), frame, spec, basis).values
        finite_seen += int(np.isfinite(before).sum())
        if np.any(after > before):
            violations.append(trial)
    record("10 monotone coverage", not violations, f"100 trials, {finite_seen} finite values before deletion, violating trials {violations}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
